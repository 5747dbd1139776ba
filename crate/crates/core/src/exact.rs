//! Numerically exact propagation of the full von Neumann equation.
//!
//! The Hamiltonian conserves the 3-component of the total angular momentum
//! sigma3/2 + J3, so it is block diagonal over total-Sz sectors. Each block
//! is real symmetric in the product basis and is diagonalized once; evolution
//! to any time is then exact (no step error). Initial states of the block
//! form rho(0) = sum_m rho_m x Pi_m/N_m are bath-diagonal, which lets the
//! reduced 2x2 state at time t be evaluated from per-sector quadratic forms
//! in the eigenbasis instead of propagating the 4^(N+1)-entry density matrix
//! or looping over the 2^N mixture members one by one; the result is the
//! member-decomposition sum, just factored.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
use crate::model::{binomial, BlockDensity, CouplingProfile};
use crate::trajectory::{model_fingerprint, Method, TrajectoryRecord};
use crate::{Mat2, Result};

/// Default cap on the bath size for exact propagation.
pub const DEFAULT_EXACT_CAP: usize = 12;

/// One total-Sz sector: basis, spectrum and cached selector contraction.
struct SectorBlock {
    /// Twice the total Sz eigenvalue of the sector.
    two_sz: i32,
    /// Basis states (central spin up?, bath mask); central-up states first,
    /// masks ascending within each group.
    basis: Vec<(bool, u32)>,
    /// Lookup from basis state to its index.
    index: HashMap<(bool, u32), usize>,
    eigvals: DVector<f64>,
    /// Columns are eigenvectors; real because the block is real symmetric.
    eigvecs: DMatrix<f64>,
    /// V^T S_+ V with S_+ the projector on central-up basis states.
    sel_plus: DMatrix<f64>,
}

/// Exact solver for a fixed coupling profile.
pub struct ExactPropagator {
    profile: CouplingProfile,
    /// Sectors indexed by total up count 0..=N+1.
    sectors: Vec<SectorBlock>,
}

/// Pure state as per-sector coefficient vectors (product basis).
#[derive(Clone)]
pub struct PureState {
    components: Vec<DVector<Complex64>>,
}

impl ExactPropagator {
    pub fn new(profile: &CouplingProfile) -> Result<Self> {
        Self::with_cap(profile, DEFAULT_EXACT_CAP)
    }

    pub fn with_cap(profile: &CouplingProfile, cap: usize) -> Result<Self> {
        let n = profile.n_bath();
        if n > cap {
            return Err(Error::ResourceLimit {
                what: "exact propagation (2^(N+1) state space)",
                requested: n,
                cap,
                advice: "use ExactPropagator::with_cap to raise the cap explicitly",
            });
        }
        let sectors: Vec<SectorBlock> = (0..=n + 1)
            .into_par_iter()
            .map(|total_up| build_sector(profile, total_up))
            .collect();
        Ok(ExactPropagator {
            profile: profile.clone(),
            sectors,
        })
    }

    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    /// Dimensions of the total-Sz blocks, ascending in Sz.
    pub fn block_dims(&self) -> Vec<usize> {
        self.sectors.iter().map(|s| s.basis.len()).collect()
    }

    /// Reduced density matrix of the central spin at each requested time
    /// (lab frame, no rotating-frame factor).
    pub fn reduced_trajectory(&self, initial: &BlockDensity, times: &[f64]) -> Result<Vec<Mat2>> {
        let contraction = self.contract(initial)?;
        Ok(times
            .par_iter()
            .map(|&t| contraction.reduced_at(t))
            .collect())
    }

    /// Trajectory record with the coherence reported in the rotating frame
    /// of the central spin, C(t) = exp(+i omega0 t) <+|rho_S(t)|->.
    pub fn evolve(&self, initial: &BlockDensity, times: &[f64]) -> Result<TrajectoryRecord> {
        let rho = self.reduced_trajectory(initial, times)?;
        let omega0 = self.profile.omega0();
        let mut record = TrajectoryRecord {
            times: times.to_vec(),
            coherence_re: Vec::with_capacity(times.len()),
            coherence_im: Vec::with_capacity(times.len()),
            population: Vec::with_capacity(times.len()),
            method: Method::Exact,
            fingerprint: model_fingerprint(&self.profile, initial),
        };
        for (&t, m) in times.iter().zip(&rho) {
            let c = Complex64::new(0.0, omega0 * t).exp() * m[(0, 1)];
            record.coherence_re.push(c.re);
            record.coherence_im.push(c.im);
            record.population.push(m[(0, 0)].re);
        }
        Ok(record)
    }

    /// Product basis state |central> x |mask> with complex central-spin
    /// amplitudes (up_amp, down_amp).
    pub fn product_state(
        &self,
        up_amp: Complex64,
        down_amp: Complex64,
        mask: u32,
    ) -> Result<PureState> {
        let n = self.profile.n_bath();
        if mask >= 1u32 << n {
            return Err(Error::invalid(
                "mask",
                format!("{mask} out of range for {n} spins"),
            ));
        }
        let mut components: Vec<DVector<Complex64>> = self
            .sectors
            .iter()
            .map(|s| DVector::zeros(s.basis.len()))
            .collect();
        let up = mask.count_ones() as usize;
        let s_up = up + 1;
        let s_dn = up;
        components[s_up][self.sectors[s_up].index[&(true, mask)]] = up_amp;
        components[s_dn][self.sectors[s_dn].index[&(false, mask)]] = down_amp;
        Ok(PureState { components })
    }

    /// Propagate a pure state by time t: psi(t) = exp(-iHt) psi, evaluated
    /// per sector from the stored eigendecomposition.
    pub fn propagate(&self, state: &PureState, t: f64) -> PureState {
        let components = self
            .sectors
            .iter()
            .zip(&state.components)
            .map(|(sector, psi)| {
                if psi.iter().all(|c| c.norm_sqr() == 0.0) {
                    return psi.clone();
                }
                let (re, im) = split_complex(psi);
                let mut c_re = sector.eigvecs.tr_mul(&re);
                let mut c_im = sector.eigvecs.tr_mul(&im);
                for i in 0..c_re.len() {
                    let ph = Complex64::new(0.0, -sector.eigvals[i] * t).exp();
                    let c = Complex64::new(c_re[i], c_im[i]) * ph;
                    c_re[i] = c.re;
                    c_im[i] = c.im;
                }
                let out_re = &sector.eigvecs * c_re;
                let out_im = &sector.eigvecs * c_im;
                DVector::from_iterator(
                    out_re.len(),
                    out_re
                        .iter()
                        .zip(out_im.iter())
                        .map(|(&r, &i)| Complex64::new(r, i)),
                )
            })
            .collect();
        PureState { components }
    }

    pub fn norm(&self, state: &PureState) -> f64 {
        state
            .components
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// `<H>` of a pure state (via the eigenbasis coefficients).
    pub fn energy(&self, state: &PureState) -> f64 {
        self.sectors
            .iter()
            .zip(&state.components)
            .map(|(sector, psi)| {
                if psi.iter().all(|c| c.norm_sqr() == 0.0) {
                    return 0.0;
                }
                let (re, im) = split_complex(psi);
                let c_re = sector.eigvecs.tr_mul(&re);
                let c_im = sector.eigvecs.tr_mul(&im);
                (0..c_re.len())
                    .map(|i| sector.eigvals[i] * (c_re[i] * c_re[i] + c_im[i] * c_im[i]))
                    .sum::<f64>()
            })
            .sum()
    }

    /// `<sigma3/2 + J3>` of a pure state.
    pub fn total_sz(&self, state: &PureState) -> f64 {
        self.sectors
            .iter()
            .zip(&state.components)
            .map(|(sector, psi)| {
                let w: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
                w * f64::from(sector.two_sz) * 0.5
            })
            .sum()
    }

    /// Reduced 2x2 density matrix Tr_B |psi><psi| (lab frame).
    pub fn reduced_state(&self, state: &PureState) -> Mat2 {
        let mut p_up = 0.0;
        let mut p_dn = 0.0;
        let mut coh = Complex64::ZERO;
        for (si, sector) in self.sectors.iter().enumerate() {
            let psi = &state.components[si];
            for (i, &(central_up, mask)) in sector.basis.iter().enumerate() {
                let amp = psi[i];
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                if central_up {
                    p_up += amp.norm_sqr();
                    // partner <-,mask| lives one sector down
                    let lower = &self.sectors[si - 1];
                    if let Some(&j) = lower.index.get(&(false, mask)) {
                        coh += amp * state.components[si - 1][j].conj();
                    }
                } else {
                    p_dn += amp.norm_sqr();
                }
            }
        }
        Mat2::new(
            Complex64::from(p_up),
            coh,
            coh.conj(),
            Complex64::from(p_dn),
        )
    }

    /// Precompute the eigenbasis contraction of an initial block state.
    fn contract(&self, initial: &BlockDensity) -> Result<Contraction> {
        let n = self.profile.n_bath();
        if initial.n_bath() != n {
            return Err(Error::invalid(
                "initial",
                format!(
                    "bath size {} does not match profile {}",
                    initial.n_bath(),
                    n
                ),
            ));
        }
        if (initial.total_trace() - 1.0).abs() > 1e-9 {
            return Err(Error::UnsupportedState(format!(
                "total trace {} is not 1",
                initial.total_trace()
            )));
        }
        // per-mask system block = rho_m / N_m
        let per_sector_scale: Vec<f64> = (0..=n).map(|up| 1.0 / binomial(n, up) as f64).collect();
        let block_of = |mask: u32| -> Mat2 {
            let up = mask.count_ones() as usize;
            initial.blocks()[up] * Complex64::from(per_sector_scale[up])
        };

        let sectors: Vec<SectorContraction> = self
            .sectors
            .par_iter()
            .map(|sector| {
                let dim = sector.basis.len();
                let diag: Vec<f64> = sector
                    .basis
                    .iter()
                    .map(|&(central_up, mask)| {
                        let b = block_of(mask);
                        if central_up {
                            b[(0, 0)].re
                        } else {
                            b[(1, 1)].re
                        }
                    })
                    .collect();
                // M_rho = V^T diag V
                let mut scaled = sector.eigvecs.clone();
                for (r, &d) in diag.iter().enumerate() {
                    for c in 0..dim {
                        scaled[(r, c)] *= d;
                    }
                }
                let m_rho = sector.eigvecs.tr_mul(&scaled);
                let mut z_plus = DMatrix::zeros(dim, dim);
                let mut z_minus = DMatrix::zeros(dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        let sel = sector.sel_plus[(i, j)];
                        z_plus[(i, j)] = m_rho[(i, j)] * sel;
                        let delta = if i == j { 1.0 } else { 0.0 };
                        z_minus[(i, j)] = m_rho[(i, j)] * (delta - sel);
                    }
                }
                SectorContraction {
                    eigvals: sector.eigvals.clone(),
                    z_plus,
                    z_minus,
                }
            })
            .collect();

        // coherence pairs (sector tu, sector tu-1) linked by shared masks
        let pairs: Vec<PairContraction> = (1..self.sectors.len())
            .into_par_iter()
            .map(|tu| {
                let upper = &self.sectors[tu];
                let lower = &self.sectors[tu - 1];
                let (nu, nl) = (upper.basis.len(), lower.basis.len());
                let mut x_re = DMatrix::<f64>::zeros(nu, nl);
                let mut x_im = DMatrix::<f64>::zeros(nu, nl);
                let mut y = DMatrix::<f64>::zeros(nu, nl);
                for (i, &(central_up, mask)) in upper.basis.iter().enumerate() {
                    if !central_up {
                        continue;
                    }
                    let j = lower.index[&(false, mask)];
                    let c = block_of(mask)[(0, 1)];
                    x_re[(i, j)] = c.re;
                    x_im[(i, j)] = c.im;
                    y[(i, j)] = 1.0;
                }
                let a_re = upper.eigvecs.tr_mul(&(&x_re * &lower.eigvecs));
                let a_im = upper.eigvecs.tr_mul(&(&x_im * &lower.eigvecs));
                let b = upper.eigvecs.tr_mul(&(&y * &lower.eigvecs));
                // z = A .* B (B real)
                let z_re = a_re.component_mul(&b);
                let z_im = a_im.component_mul(&b);
                PairContraction {
                    eig_upper: upper.eigvals.clone(),
                    eig_lower: lower.eigvals.clone(),
                    z_re,
                    z_im,
                }
            })
            .collect();

        Ok(Contraction { sectors, pairs })
    }
}

struct SectorContraction {
    eigvals: DVector<f64>,
    z_plus: DMatrix<f64>,
    z_minus: DMatrix<f64>,
}

struct PairContraction {
    eig_upper: DVector<f64>,
    eig_lower: DVector<f64>,
    z_re: DMatrix<f64>,
    z_im: DMatrix<f64>,
}

struct Contraction {
    sectors: Vec<SectorContraction>,
    pairs: Vec<PairContraction>,
}

impl Contraction {
    /// rho_S(t): populations from per-sector quadratic forms, the coherence
    /// from adjacent-sector bilinear forms.
    fn reduced_at(&self, t: f64) -> Mat2 {
        let mut p_up = 0.0;
        let mut p_dn = 0.0;
        for s in &self.sectors {
            let (phi_re, phi_im) = phases(&s.eigvals, t);
            p_up += quad_form(&s.z_plus, &phi_re, &phi_im);
            p_dn += quad_form(&s.z_minus, &phi_re, &phi_im);
        }
        let mut coh = Complex64::ZERO;
        for p in &self.pairs {
            let (u_re, u_im) = phases(&p.eig_upper, t);
            let (l_re, l_im) = phases(&p.eig_lower, t);
            coh += bilinear_form(&p.z_re, &p.z_im, &u_re, &u_im, &l_re, &l_im);
        }
        Mat2::new(
            Complex64::from(p_up),
            coh,
            coh.conj(),
            Complex64::from(p_dn),
        )
    }
}

/// Components of exp(-i E_k t) for every eigenvalue.
fn phases(eigvals: &DVector<f64>, t: f64) -> (DVector<f64>, DVector<f64>) {
    let n = eigvals.len();
    let mut re = DVector::zeros(n);
    let mut im = DVector::zeros(n);
    for k in 0..n {
        let (s, c) = (-eigvals[k] * t).sin_cos();
        re[k] = c;
        im[k] = s;
    }
    (re, im)
}

/// sum_ij Z[i,j] phi_i conj(phi_j) for real Z and unit phases phi; the value
/// is real because Z is symmetric.
fn quad_form(z: &DMatrix<f64>, phi_re: &DVector<f64>, phi_im: &DVector<f64>) -> f64 {
    // w = Z conj(phi)
    let w_re = z * phi_re;
    let w_im = z * phi_im; // actual imaginary part of w is -w_im
                           // Re(phi^T w): (a+ib)(c-id) -> real part ac + bd
    let mut acc = 0.0;
    for i in 0..w_re.len() {
        acc += phi_re[i] * w_re[i] + phi_im[i] * w_im[i];
    }
    acc
}

/// sum_ij Z[i,j] u_i conj(l_j) for complex Z (given as re/im) and unit
/// phases u (upper sector) and l (lower sector).
fn bilinear_form(
    z_re: &DMatrix<f64>,
    z_im: &DMatrix<f64>,
    u_re: &DVector<f64>,
    u_im: &DVector<f64>,
    l_re: &DVector<f64>,
    l_im: &DVector<f64>,
) -> Complex64 {
    // w = Z conj(l): w_re = Zre*lre + Zim*lim ; w_im = Zim*lre - Zre*lim
    let w_re = z_re * l_re + z_im * l_im;
    let w_im = z_im * l_re - z_re * l_im;
    let mut acc = Complex64::ZERO;
    for i in 0..w_re.len() {
        let u = Complex64::new(u_re[i], u_im[i]);
        acc += u * Complex64::new(w_re[i], w_im[i]);
    }
    acc
}

fn split_complex(v: &DVector<Complex64>) -> (DVector<f64>, DVector<f64>) {
    let re = DVector::from_iterator(v.len(), v.iter().map(|z| z.re));
    let im = DVector::from_iterator(v.len(), v.iter().map(|z| z.im));
    (re, im)
}

/// Assemble and diagonalize the total-Sz sector with `total_up` up spins
/// counting the central one.
fn build_sector(profile: &CouplingProfile, total_up: usize) -> SectorBlock {
    let n = profile.n_bath();
    let omega0 = profile.omega0();
    let mut basis = Vec::new();
    if total_up >= 1 && total_up - 1 <= n {
        for mask in 0u32..1u32 << n {
            if mask.count_ones() as usize == total_up - 1 {
                basis.push((true, mask));
            }
        }
    }
    if total_up <= n {
        for mask in 0u32..1u32 << n {
            if mask.count_ones() as usize == total_up {
                basis.push((false, mask));
            }
        }
    }
    let dim = basis.len();
    let index: HashMap<(bool, u32), usize> =
        basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();

    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (i, &(central_up, mask)) in basis.iter().enumerate() {
        let u = if central_up { 1.0 } else { -1.0 };
        let k3 = profile.k3_of_mask(mask);
        h[(i, i)] = u * omega0 / 2.0 + 2.0 * u * k3;
        if central_up {
            // 2 sigma_- K_+ : |+, mask> -> 2 alpha_k |-, mask with k raised>
            for k in 0..n {
                if mask >> k & 1 == 0 {
                    let j = index[&(false, mask | 1 << k)];
                    let v = 2.0 * profile.alpha(k);
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
        }
    }

    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    let eigvecs = eig.eigenvectors;
    let eigvals = eig.eigenvalues;

    // V^T S_+ V from the central-up rows of V
    let n_up_states = basis.iter().filter(|&&(c, _)| c).count();
    let v_up = eigvecs.rows(0, n_up_states).clone_owned();
    let sel_plus = v_up.tr_mul(&v_up);

    SectorBlock {
        two_sz: 2 * total_up as i32 - (n as i32 + 1),
        basis,
        index,
        eigvals,
        eigvecs,
        sel_plus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BathSpec, SectorTable};

    fn plus() -> Mat2 {
        Mat2::new(
            Complex64::new(1.0, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ZERO,
        )
    }

    fn superposition() -> Mat2 {
        let h = Complex64::new(0.5, 0.0);
        Mat2::new(h, h, h, h)
    }

    fn unpolarized(profile: &CouplingProfile, rho: &Mat2) -> BlockDensity {
        let table = SectorTable::build(profile).unwrap();
        BlockDensity::initial(rho, &BathSpec::Unpolarized, &table).unwrap()
    }

    #[test]
    fn one_spin_sector_matrix() {
        let alpha = 0.3;
        let omega0 = 1.0;
        let profile = CouplingProfile::uniform(1, omega0, alpha).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        // total_up = 1 is the Sz = 0 sector with basis {|+,down>, |-,up>}
        let sector = &prop.sectors[1];
        assert_eq!(sector.basis, vec![(true, 0), (false, 1)]);
        // reconstruct H from the eigendecomposition
        let d = DMatrix::from_diagonal(&sector.eigvals);
        let h = &sector.eigvecs * d * sector.eigvecs.transpose();
        assert!((h[(0, 0)] - (omega0 / 2.0 - alpha)).abs() < 1e-12);
        assert!((h[(1, 1)] - (-omega0 / 2.0 - alpha)).abs() < 1e-12);
        assert!((h[(0, 1)] - 2.0 * alpha).abs() < 1e-12);
        assert!((h[(1, 0)] - 2.0 * alpha).abs() < 1e-12);
    }

    #[test]
    fn block_dims_complete() {
        let profile = CouplingProfile::gaussian(5, 1.0, 0.01).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        let total: usize = prop.block_dims().iter().sum();
        assert_eq!(total, 1 << 6);
    }

    #[test]
    fn eigvectors_orthonormal() {
        let profile = CouplingProfile::gaussian(4, 1.0, 0.05).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        for sector in &prop.sectors {
            let vt_v = sector.eigvecs.tr_mul(&sector.eigvecs);
            let eye = DMatrix::<f64>::identity(vt_v.nrows(), vt_v.ncols());
            assert!((vt_v - eye).abs().max() < 1e-12);
        }
    }

    #[test]
    fn decoupled_bath_is_static() {
        // alpha -> 0 limit approximated by a vanishingly small coupling
        let profile = CouplingProfile::uniform(3, 1.0, 1e-300).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        let initial = unpolarized(&profile, &superposition());
        let times: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let rec = prop.evolve(&initial, &times).unwrap();
        for i in 0..times.len() {
            assert!((rec.coherence_re[i] - 0.5).abs() < 1e-10);
            assert!(rec.coherence_im[i].abs() < 1e-10);
            assert!((rec.population[i] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rabi_oscillation_single_bath_spin() {
        let alpha = 0.2;
        let omega0 = 1.0;
        let profile = CouplingProfile::uniform(1, omega0, alpha).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        // |+> x |down>: encode as blocks concentrated on m = -1/2
        let blocks = vec![plus(), Mat2::zeros()];
        let initial = BlockDensity::from_blocks(1, blocks).unwrap();
        let rabi_sq = omega0 * omega0 / 4.0 + 4.0 * alpha * alpha;
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let rec = prop.evolve(&initial, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let expect = 1.0 - (4.0 * alpha * alpha / rabi_sq) * (rabi_sq.sqrt() * t).sin().powi(2);
            assert!(
                (rec.population[i] - expect).abs() < 1e-10,
                "t={t}: {} vs {expect}",
                rec.population[i]
            );
        }
    }

    #[test]
    fn trace_and_hermiticity_preserved() {
        let profile = CouplingProfile::gaussian(5, 1.0, 0.05).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        let initial = unpolarized(&profile, &superposition());
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 2.0).collect();
        let rho = prop.reduced_trajectory(&initial, &times).unwrap();
        for m in &rho {
            assert!(((m[(0, 0)] + m[(1, 1)]).re - 1.0).abs() < 1e-10);
            assert!((m[(0, 1)] - m[(1, 0)].conj()).norm() < 1e-14);
            // physical state
            let (lo, hi) = crate::model::hermitian_eigs_2x2(m);
            assert!(lo > -1e-10 && hi < 1.0 + 1e-10);
        }
    }

    #[test]
    fn group_property_of_propagation() {
        let profile = CouplingProfile::gaussian(4, 1.0, 0.1).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        let amp = Complex64::new(0.6, 0.0);
        let amp2 = Complex64::new(0.0, 0.8);
        let psi = prop.product_state(amp, amp2, 0b0101).unwrap();
        let direct = prop.propagate(&psi, 7.3);
        let composed = prop.propagate(&prop.propagate(&psi, 3.1), 4.2);
        for (a, b) in direct.components.iter().zip(&composed.components) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn member_conservation_laws() {
        let profile = CouplingProfile::gaussian(4, 1.0, 0.08).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = prop.product_state(amp, amp, 0b0011).unwrap();
        let e0 = prop.energy(&psi);
        let sz0 = prop.total_sz(&psi);
        for &t in &[0.5, 5.0, 50.0, 500.0] {
            let evolved = prop.propagate(&psi, t);
            assert!((prop.norm(&evolved) - 1.0).abs() < 1e-10);
            assert!((prop.energy(&evolved) - e0).abs() <= 1e-10 * e0.abs().max(1.0));
            assert!((prop.total_sz(&evolved) - sz0).abs() <= 1e-10 * sz0.abs().max(1.0));
        }
    }

    #[test]
    fn contraction_matches_member_sum() {
        // the factored evaluation must equal the explicit member loop
        let profile = CouplingProfile::gaussian(3, 1.0, 0.07).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        let initial = unpolarized(&profile, &superposition());
        let times = [0.0, 1.3, 4.7, 12.0];
        let rho = prop.reduced_trajectory(&initial, &times).unwrap();
        // member loop: |chi> x |b> for every mask b, weight 2^-N
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for (ti, &t) in times.iter().enumerate() {
            let mut acc = Mat2::zeros();
            for mask in 0u32..8 {
                let psi = prop.product_state(amp, amp, mask).unwrap();
                let evolved = prop.propagate(&psi, t);
                acc += prop.reduced_state(&evolved) * Complex64::from(1.0 / 8.0);
            }
            for idx in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                assert!(
                    (acc[idx] - rho[ti][idx]).norm() < 1e-12,
                    "t={t} idx={idx:?}"
                );
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let profile = CouplingProfile::gaussian(13, 1.0, 0.01).unwrap();
        assert!(ExactPropagator::new(&profile).is_err());
    }

    #[test]
    fn quadratic_form_is_real() {
        let profile = CouplingProfile::gaussian(3, 1.0, 0.2).unwrap();
        let prop = ExactPropagator::new(&profile).unwrap();
        let initial = unpolarized(&profile, &superposition());
        let contraction = prop.contract(&initial).unwrap();
        // imaginary part of the population forms must vanish: evaluate the
        // complex bilinear directly
        for s in &contraction.sectors {
            let (re, im) = phases(&s.eigvals, 3.7);
            let n = re.len();
            let mut imag = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let phi_i = Complex64::new(re[i], im[i]);
                    let phi_j = Complex64::new(re[j], im[j]);
                    imag += (s.z_plus[(i, j)] * phi_i * phi_j.conj()).im;
                }
            }
            assert!(imag.abs() < 1e-12);
        }
    }
}
