//! Physical model: hyperfine couplings, bath sectors and initial block states.
//!
//! The bath Hilbert space splits into eigenspaces of the collective operator
//! J3 = (1/2) sum_k sigma3^k. A [`Sector`] labels one eigenvalue m, a
//! [`SectorTable`] enumerates every basis configuration of each eigenspace,
//! and a [`BlockDensity`] stores the family of unnormalized 2x2 system blocks
//! rho_m whose sum is the reduced state of the central spin.

use num_complex::Complex64;

use crate::error::Error;
use crate::{Mat2, Result};

/// Default cap on full 2^N sector enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

/// Sector label: the J3 eigenvalue m, stored as 2m so that half-integer
/// sectors of odd baths stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sector(pub i32);

impl Sector {
    /// The eigenvalue m itself.
    pub fn m(self) -> f64 {
        f64::from(self.0) * 0.5
    }

    pub fn two_m(self) -> i32 {
        self.0
    }

    /// Number of up spins in this sector of an `n_bath`-spin bath,
    /// i.e. N/2 + m. `None` if the sector does not exist for this bath.
    pub fn up_count(self, n_bath: usize) -> Option<usize> {
        let two_up = self.0 + n_bath as i32;
        if two_up < 0 || two_up % 2 != 0 || two_up > 2 * n_bath as i32 {
            return None;
        }
        Some((two_up / 2) as usize)
    }

    /// Sector with `up` spins up out of `n_bath`.
    pub fn from_up_count(up: usize, n_bath: usize) -> Self {
        Sector(2 * up as i32 - n_bath as i32)
    }

    /// Neighbouring sector m + 1 (may fall outside the physical range).
    pub fn next_up(self) -> Sector {
        Sector(self.0 + 2)
    }

    /// Neighbouring sector m - 1.
    pub fn next_down(self) -> Sector {
        Sector(self.0 - 2)
    }
}

/// Binomial coefficient as an exact u64 (n <= 63 is plenty here).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Dimension of the total density-matrix space for N bath spins plus the
/// central spin: 2^(2N+2) - 1 real parameters.
pub fn density_matrix_dim(n_bath: usize) -> u64 {
    (1u64 << (2 * n_bath + 2)) - 1
}

/// Hyperfine couplings alpha_k together with the field splitting omega0.
///
/// The profile form is alpha_k = alpha0 * exp(-(k/k0)^exponent) for
/// k = 1..N; `a1` and `a2` are the mean and root mean square of the alphas.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    n_bath: usize,
    omega0: f64,
    alpha0: f64,
    k0: f64,
    exponent: f64,
    alphas: Vec<f64>,
    a1: f64,
    a2: f64,
}

impl CouplingProfile {
    /// Build the exponential-profile couplings.
    pub fn build(n_bath: usize, omega0: f64, alpha0: f64, k0: f64, exponent: f64) -> Result<Self> {
        if n_bath < 1 {
            return Err(Error::invalid("n_bath", "must be at least 1"));
        }
        for (field, v) in [
            ("omega0", omega0),
            ("alpha0", alpha0),
            ("k0", k0),
            ("exponent", exponent),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::invalid(field, format!("must be positive, got {v}")));
            }
        }
        let alphas: Vec<f64> = (1..=n_bath)
            .map(|k| alpha0 * (-(k as f64 / k0).powf(exponent)).exp())
            .collect();
        Ok(Self::assemble(n_bath, omega0, alpha0, k0, exponent, alphas))
    }

    /// Gaussian-envelope profile: k0 = N/2 and exponent 2.
    pub fn gaussian(n_bath: usize, omega0: f64, alpha0: f64) -> Result<Self> {
        Self::build(n_bath, omega0, alpha0, n_bath as f64 / 2.0, 2.0)
    }

    /// Uniform couplings alpha_k = c for every k.
    pub fn uniform(n_bath: usize, omega0: f64, c: f64) -> Result<Self> {
        Self::from_alphas(omega0, vec![c; n_bath])
    }

    /// Explicit coupling list (k0/exponent recorded as placeholders).
    pub fn from_alphas(omega0: f64, alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::invalid(
                "alphas",
                "must contain at least one coupling",
            ));
        }
        if omega0 <= 0.0 || !omega0.is_finite() {
            return Err(Error::invalid(
                "omega0",
                format!("must be positive, got {omega0}"),
            ));
        }
        if let Some(bad) = alphas.iter().find(|a| **a <= 0.0 || !a.is_finite()) {
            return Err(Error::invalid(
                "alphas",
                format!("couplings must be positive, got {bad}"),
            ));
        }
        let n = alphas.len();
        let alpha0 = alphas[0];
        Ok(Self::assemble(
            n,
            omega0,
            alpha0,
            n as f64 / 2.0,
            2.0,
            alphas,
        ))
    }

    fn assemble(
        n_bath: usize,
        omega0: f64,
        alpha0: f64,
        k0: f64,
        exponent: f64,
        alphas: Vec<f64>,
    ) -> Self {
        let n = n_bath as f64;
        let a1 = alphas.iter().sum::<f64>() / n;
        let a2 = (alphas.iter().map(|a| a * a).sum::<f64>() / n).sqrt();
        CouplingProfile {
            n_bath,
            omega0,
            alpha0,
            k0,
            exponent,
            alphas,
            a1,
            a2,
        }
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Coupling of bath spin k, zero-indexed (index 0 holds alpha_1).
    pub fn alpha(&self, k: usize) -> f64 {
        self.alphas[k]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Arithmetic mean A1 of the couplings.
    pub fn a1(&self) -> f64 {
        self.a1
    }

    /// Root mean square A2 of the couplings.
    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// Dimensionless strength parameter beta = 2 sqrt(N) A2 / omega0.
    pub fn beta(&self) -> f64 {
        2.0 * (self.n_bath as f64).sqrt() * self.a2 / self.omega0
    }

    /// Sector labels m = -N/2 .. N/2 in ascending order.
    pub fn sector_range(&self) -> impl Iterator<Item = Sector> {
        let n = self.n_bath;
        (0..=n).map(move |up| Sector::from_up_count(up, n))
    }

    /// K3 eigenvalue (1/2) sum_k alpha_k s_k of one bath configuration,
    /// bit k set meaning spin k up.
    pub fn k3_of_mask(&self, mask: u32) -> f64 {
        let mut acc = 0.0;
        for (k, a) in self.alphas.iter().enumerate() {
            let s = if mask >> k & 1 == 1 { 1.0 } else { -1.0 };
            acc += a * s;
        }
        0.5 * acc
    }
}

/// One J3 eigenspace: its degeneracy, basis bitmasks and K3 spectrum.
#[derive(Debug, Clone)]
pub struct SectorEntry {
    /// Sector label m.
    pub sector: Sector,
    /// Degeneracy N_m = binomial(N, N/2 + m).
    pub degeneracy: u64,
    /// Basis configurations, bit k set = bath spin k up; ascending order.
    pub configs: Vec<u32>,
    /// K3 eigenvalue per configuration, aligned with `configs`.
    pub k3_values: Vec<f64>,
}

/// All sectors of a bath, in ascending m.
#[derive(Debug, Clone)]
pub struct SectorTable {
    n_bath: usize,
    sectors: Vec<SectorEntry>,
}

impl SectorTable {
    /// Enumerate every sector of the profile's bath (default cap 16 spins).
    pub fn build(profile: &CouplingProfile) -> Result<Self> {
        Self::build_with_cap(profile, DEFAULT_ENUMERATION_CAP)
    }

    /// Enumerate with an explicit cap on the bath size.
    pub fn build_with_cap(profile: &CouplingProfile, cap: usize) -> Result<Self> {
        let n = profile.n_bath();
        if n > cap {
            return Err(Error::ResourceLimit {
                what: "sector enumeration (2^N configurations)",
                requested: n,
                cap,
                advice: "use SectorTable::build_with_cap to raise the cap explicitly",
            });
        }
        let mut sectors: Vec<SectorEntry> = (0..=n)
            .map(|up| SectorEntry {
                sector: Sector::from_up_count(up, n),
                degeneracy: binomial(n, up),
                configs: Vec::with_capacity(binomial(n, up) as usize),
                k3_values: Vec::new(),
            })
            .collect();
        for mask in 0u32..1u32 << n {
            let up = mask.count_ones() as usize;
            sectors[up].configs.push(mask);
        }
        for entry in &mut sectors {
            entry.k3_values = entry
                .configs
                .iter()
                .map(|&mask| profile.k3_of_mask(mask))
                .collect();
            debug_assert_eq!(entry.configs.len() as u64, entry.degeneracy);
        }
        Ok(SectorTable { n_bath: n, sectors })
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    pub fn sectors(&self) -> &[SectorEntry] {
        &self.sectors
    }

    /// Entry for sector m, if it exists for this bath.
    pub fn entry(&self, sector: Sector) -> Option<&SectorEntry> {
        sector.up_count(self.n_bath).map(|up| &self.sectors[up])
    }

    /// Degeneracy N_m, zero outside the physical range.
    pub fn degeneracy(&self, sector: Sector) -> u64 {
        self.entry(sector).map_or(0, |e| e.degeneracy)
    }
}

/// Bath part of an initial state satisfying the correlated-projection
/// product condition.
#[derive(Debug, Clone, PartialEq)]
pub enum BathSpec {
    /// Infinite-temperature state I/2^N; sector weights N_m / 2^N.
    Unpolarized,
    /// Explicit sector weights, must be nonnegative and sum to one.
    SectorWeights(Vec<(Sector, f64)>),
}

/// Family of unnormalized 2x2 system blocks rho_m; the reduced state of the
/// central spin is their sum. Basis: index 0 = |+>, index 1 = |->.
#[derive(Debug, Clone)]
pub struct BlockDensity {
    n_bath: usize,
    blocks: Vec<Mat2>,
}

const HERM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;

/// Eigenvalues of a Hermitian 2x2 matrix, ascending.
pub fn hermitian_eigs_2x2(m: &Mat2) -> (f64, f64) {
    let tr = (m[(0, 0)] + m[(1, 1)]).re;
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

fn hermiticity_defect(m: &Mat2) -> f64 {
    let mut d: f64 = (m[(0, 1)] - m[(1, 0)].conj()).norm();
    d = d.max(m[(0, 0)].im.abs()).max(m[(1, 1)].im.abs());
    d
}

/// Check that `rho` is a density matrix: Hermitian, unit trace, PSD.
pub fn validate_density_2x2(rho: &Mat2) -> Result<()> {
    if hermiticity_defect(rho) > HERM_TOL {
        return Err(Error::invalid("rho_s", "matrix is not Hermitian"));
    }
    let tr = (rho[(0, 0)] + rho[(1, 1)]).re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::invalid(
            "rho_s",
            format!("trace is {tr}, expected 1"),
        ));
    }
    let (lo, _) = hermitian_eigs_2x2(rho);
    if lo < PSD_TOL {
        return Err(Error::invalid(
            "rho_s",
            format!("negative eigenvalue {lo:.3e}"),
        ));
    }
    Ok(())
}

impl BlockDensity {
    /// Initial block family from a system state and a bath specification;
    /// the result satisfies the product condition by construction.
    pub fn initial(rho_s: &Mat2, bath: &BathSpec, table: &SectorTable) -> Result<Self> {
        validate_density_2x2(rho_s)?;
        let n = table.n_bath();
        let mut blocks = vec![Mat2::zeros(); n + 1];
        match bath {
            BathSpec::Unpolarized => {
                let norm = (1u64 << n) as f64;
                for entry in table.sectors() {
                    let up = entry.sector.up_count(n).expect("sector in range");
                    blocks[up] = rho_s * Complex64::from(entry.degeneracy as f64 / norm);
                }
            }
            BathSpec::SectorWeights(weights) => {
                let mut total = 0.0;
                for &(sector, w) in weights {
                    let up = sector.up_count(n).ok_or_else(|| {
                        Error::invalid("bath", format!("sector 2m = {} out of range", sector.0))
                    })?;
                    if w < 0.0 {
                        return Err(Error::invalid("bath", format!("negative weight {w}")));
                    }
                    blocks[up] += rho_s * Complex64::from(w);
                    total += w;
                }
                if (total - 1.0).abs() > TRACE_TOL {
                    return Err(Error::invalid(
                        "bath",
                        format!("weights sum to {total}, expected 1"),
                    ));
                }
            }
        }
        Ok(BlockDensity { n_bath: n, blocks })
    }

    /// Assemble from explicit blocks indexed by up-spin count. Validates the
    /// blocks as an (unnormalized-per-sector) quantum state family.
    pub fn from_blocks(n_bath: usize, blocks: Vec<Mat2>) -> Result<Self> {
        if blocks.len() != n_bath + 1 {
            return Err(Error::invalid(
                "blocks",
                format!("expected {} blocks, got {}", n_bath + 1, blocks.len()),
            ));
        }
        let mut total = 0.0;
        for b in &blocks {
            if hermiticity_defect(b) > HERM_TOL {
                return Err(Error::invalid("blocks", "block is not Hermitian"));
            }
            let (lo, _) = hermitian_eigs_2x2(b);
            if lo < PSD_TOL {
                return Err(Error::invalid(
                    "blocks",
                    format!("block has negative eigenvalue {lo:.3e}"),
                ));
            }
            total += (b[(0, 0)] + b[(1, 1)]).re;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "blocks",
                format!("total trace is {total}, expected 1"),
            ));
        }
        Ok(BlockDensity { n_bath, blocks })
    }

    /// Unchecked assembly for solver internals.
    pub(crate) fn from_raw(n_bath: usize, blocks: Vec<Mat2>) -> Self {
        BlockDensity { n_bath, blocks }
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    /// Block rho_m; zero matrix outside the physical sector range.
    pub fn block(&self, sector: Sector) -> Mat2 {
        sector
            .up_count(self.n_bath)
            .map_or_else(Mat2::zeros, |up| self.blocks[up])
    }

    /// Blocks in ascending m, indexed by up-spin count.
    pub fn blocks(&self) -> &[Mat2] {
        &self.blocks
    }

    /// Reduced state of the central spin, rho_S = sum_m rho_m.
    pub fn reduced(&self) -> Mat2 {
        let mut acc = Mat2::zeros();
        for b in &self.blocks {
            acc += b;
        }
        acc
    }

    /// Total trace sum_m tr rho_m.
    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(|b| (b[(0, 0)] + b[(1, 1)]).re).sum()
    }

    /// Coherence <+|rho_S|->.
    pub fn coherence(&self) -> Complex64 {
        self.reduced()[(0, 1)]
    }

    /// Population <+|rho_S|+>.
    pub fn population(&self) -> f64 {
        self.blocks.iter().map(|b| b[(0, 0)].re).sum()
    }

    /// Whether this is |+><+| with the unpolarized bath, the regime of the
    /// analytic population formulas.
    pub fn is_excited_unpolarized(&self) -> bool {
        let norm = (1u64 << self.n_bath) as f64;
        self.blocks.iter().enumerate().all(|(up, b)| {
            let w = binomial(self.n_bath, up) as f64 / norm;
            (b[(0, 0)].re - w).abs() < 1e-12
                && b[(0, 0)].im.abs() < 1e-12
                && b[(0, 1)].norm() < 1e-12
                && b[(1, 0)].norm() < 1e-12
                && b[(1, 1)].norm() < 1e-12
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn plus_state() -> Mat2 {
        Mat2::new(C::new(1.0, 0.0), C::ZERO, C::ZERO, C::ZERO)
    }

    fn superposition_state() -> Mat2 {
        let h = C::new(0.5, 0.0);
        Mat2::new(h, h, h, h)
    }

    #[test]
    fn gaussian_profile_values() {
        let p = CouplingProfile::build(10, 1.0, 0.01, 5.0, 2.0).unwrap();
        // alpha_1 = 0.01 * exp(-(1/5)^2)
        assert!((p.alpha(0) - 0.01 * (-0.04f64).exp()).abs() < 1e-16);
        assert!((p.alpha(0) - 0.0096079).abs() < 1e-7);
        // couplings decay with k
        for k in 1..10 {
            assert!(p.alpha(k) < p.alpha(k - 1));
        }
    }

    #[test]
    fn beta_matches_reported_value() {
        let p = CouplingProfile::build(10, 1.0, 0.01, 5.0, 2.0).unwrap();
        let rounded = (p.beta() * 100.0).round() / 100.0;
        assert_eq!(rounded, 0.03);
    }

    #[test]
    fn means_recomputable() {
        let p = CouplingProfile::build(10, 1.0, 0.01, 5.0, 2.0).unwrap();
        let mean = p.alphas().iter().sum::<f64>() / 10.0;
        let msq = p.alphas().iter().map(|a| a * a).sum::<f64>() / 10.0;
        assert!((p.a1() - mean).abs() <= 1e-14 * p.a1());
        assert!((p.a2() * p.a2() - msq).abs() <= 1e-14 * p.a2() * p.a2());
        assert!(p.a2() >= p.a1());
        assert!(p.a1() > 0.0);
    }

    #[test]
    fn uniform_means_coincide() {
        let p = CouplingProfile::uniform(7, 1.0, 0.02).unwrap();
        assert_eq!(p.a1(), 0.02);
        assert!((p.a2() - 0.02).abs() < 1e-17);
    }

    #[test]
    fn invalid_arguments_name_the_field() {
        let err = CouplingProfile::build(10, 0.0, 0.01, 5.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("omega0"));
        let err = CouplingProfile::build(10, 1.0, -0.01, 5.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("alpha0"));
        let err = CouplingProfile::build(0, 1.0, 0.01, 5.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("n_bath"));
    }

    #[test]
    fn sector_degeneracies() {
        let p = CouplingProfile::gaussian(4, 1.0, 0.01).unwrap();
        let t = SectorTable::build(&p).unwrap();
        assert_eq!(t.degeneracy(Sector(0)), 6);
        let p = CouplingProfile::gaussian(10, 1.0, 0.01).unwrap();
        let t = SectorTable::build(&p).unwrap();
        let total: u64 = t.sectors().iter().map(|e| e.degeneracy).sum();
        assert_eq!(total, 1024);
    }

    #[test]
    fn sector_completeness_and_k3() {
        let p = CouplingProfile::gaussian(6, 1.0, 0.01).unwrap();
        let t = SectorTable::build(&p).unwrap();
        let mut seen = [false; 64];
        for entry in t.sectors() {
            let up = entry.sector.up_count(6).unwrap();
            for (&mask, &k3) in entry.configs.iter().zip(&entry.k3_values) {
                assert_eq!(mask.count_ones() as usize, up);
                assert!(!seen[mask as usize], "duplicate mask");
                seen[mask as usize] = true;
                assert!((k3 - p.k3_of_mask(mask)).abs() <= 1e-15);
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn uniform_k3_is_cm() {
        let c = 0.013;
        let p = CouplingProfile::uniform(5, 1.0, c).unwrap();
        let t = SectorTable::build(&p).unwrap();
        for entry in t.sectors() {
            for &k3 in &entry.k3_values {
                assert!((k3 - c * entry.sector.m()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn odd_bath_half_integer_sectors() {
        let p = CouplingProfile::gaussian(3, 1.0, 0.01).unwrap();
        let t = SectorTable::build(&p).unwrap();
        let two_ms: Vec<i32> = t.sectors().iter().map(|e| e.sector.0).collect();
        assert_eq!(two_ms, vec![-3, -1, 1, 3]);
        let degs: Vec<u64> = t.sectors().iter().map(|e| e.degeneracy).collect();
        assert_eq!(degs, vec![1, 3, 3, 1]);
    }

    #[test]
    fn enumeration_cap() {
        let p = CouplingProfile::gaussian(17, 1.0, 0.01).unwrap();
        let err = SectorTable::build(&p).unwrap_err();
        assert!(err.to_string().contains("cap"));
        assert!(SectorTable::build_with_cap(&p, 17).is_ok());
    }

    #[test]
    fn unpolarized_initial_blocks() {
        let p = CouplingProfile::gaussian(10, 1.0, 0.01).unwrap();
        let t = SectorTable::build(&p).unwrap();
        let bd = BlockDensity::initial(&plus_state(), &BathSpec::Unpolarized, &t).unwrap();
        let top = bd.block(Sector(10));
        assert!(((top[(0, 0)] + top[(1, 1)]).re - 1.0 / 1024.0).abs() < 1e-15);
        assert!((bd.total_trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn superposition_normalization() {
        let p = CouplingProfile::gaussian(6, 1.0, 0.01).unwrap();
        let t = SectorTable::build(&p).unwrap();
        let bd = BlockDensity::initial(&superposition_state(), &BathSpec::Unpolarized, &t).unwrap();
        assert!((bd.total_trace() - 1.0).abs() < 1e-12);
        assert!((bd.coherence() - C::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn concentrated_weights() {
        let p = CouplingProfile::gaussian(4, 1.0, 0.01).unwrap();
        let t = SectorTable::build(&p).unwrap();
        let bath = BathSpec::SectorWeights(vec![(Sector(0), 1.0)]);
        let bd = BlockDensity::initial(&superposition_state(), &bath, &t).unwrap();
        assert_eq!(bd.block(Sector(0)), superposition_state());
        assert_eq!(bd.block(Sector(2)), Mat2::zeros());
        assert_eq!(bd.block(Sector(-4)), Mat2::zeros());
    }

    #[test]
    fn initial_state_validation() {
        let p = CouplingProfile::gaussian(4, 1.0, 0.01).unwrap();
        let t = SectorTable::build(&p).unwrap();
        // trace != 1
        let bad = Mat2::new(C::new(0.9, 0.0), C::ZERO, C::ZERO, C::ZERO);
        assert!(BlockDensity::initial(&bad, &BathSpec::Unpolarized, &t).is_err());
        // not Hermitian
        let bad = Mat2::new(
            C::new(0.5, 0.0),
            C::new(0.1, 0.0),
            C::new(0.3, 0.0),
            C::new(0.5, 0.0),
        );
        assert!(BlockDensity::initial(&bad, &BathSpec::Unpolarized, &t).is_err());
        // not PSD: off-diagonal too large
        let bad = Mat2::new(
            C::new(0.5, 0.0),
            C::new(0.9, 0.0),
            C::new(0.9, 0.0),
            C::new(0.5, 0.0),
        );
        assert!(BlockDensity::initial(&bad, &BathSpec::Unpolarized, &t).is_err());
        // negative weight
        let bath = BathSpec::SectorWeights(vec![(Sector(0), 1.5), (Sector(2), -0.5)]);
        assert!(BlockDensity::initial(&plus_state(), &bath, &t).is_err());
        // weights not normalized
        let bath = BathSpec::SectorWeights(vec![(Sector(0), 0.7)]);
        assert!(BlockDensity::initial(&plus_state(), &bath, &t).is_err());
    }

    #[test]
    fn density_space_dimension() {
        assert_eq!(density_matrix_dim(10), 4_194_303);
        assert_eq!(density_matrix_dim(10), (1u64 << 22) - 1);
    }

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(10, 5), 252);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }
}
