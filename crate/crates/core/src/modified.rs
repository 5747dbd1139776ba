//! TCL scheme in the modified interaction picture.
//!
//! Subtracting only the mean-field diagonal term 2 A2 sigma3 J3 from the
//! interaction leaves single-line correlation functions
//! f_m = B_+(m) exp(i Omega_+(m) tau) and g_m = B_-(m) exp(i Omega_-(m) tau),
//! so every rate and both observables have closed forms. The price is a
//! nonvanishing first-order generator (a sector-dependent commutator) and a
//! time-linear dephasing term; both are included here, in the closed forms
//! and in the direct block integration.

use num_complex::Complex64;

use crate::error::Error;
use crate::model::{binomial, BlockDensity, CouplingProfile, Sector};
use crate::ode::{integrate, OdeOptions};
use crate::spectra::{line_double_integral, line_single_integral, SERIES_THRESHOLD};
use crate::tcl2::{assemble_record, blocks_to_state, state_to_blocks};
use crate::trajectory::{
    model_fingerprint, profile_fingerprint, BlockTrajectory, Method, TrajectoryRecord,
};
use crate::Result;

/// Per-sector line parameters of the modified picture.
///
/// Omega_+(m) = omega0 + 4 A2 (m + 1/2), Omega_-(m) = -omega0 + 4 A2 (-m + 1/2),
/// B_+(m) = 4 A2^2 (N/2 - m), B_-(m) = 4 A2^2 (N/2 + m).
#[derive(Debug, Clone)]
pub struct ModifiedPictureParams {
    n_bath: usize,
    omega0: f64,
    a1: f64,
    a2: f64,
    beta: f64,
    omega_plus: Vec<f64>,
    omega_minus: Vec<f64>,
    b_plus: Vec<f64>,
    b_minus: Vec<f64>,
}

impl ModifiedPictureParams {
    pub fn from_profile(profile: &CouplingProfile) -> Self {
        let n = profile.n_bath();
        let (omega0, a1, a2) = (profile.omega0(), profile.a1(), profile.a2());
        let half_n = n as f64 / 2.0;
        let mut omega_plus = Vec::with_capacity(n + 1);
        let mut omega_minus = Vec::with_capacity(n + 1);
        let mut b_plus = Vec::with_capacity(n + 1);
        let mut b_minus = Vec::with_capacity(n + 1);
        for up in 0..=n {
            let m = up as f64 - half_n;
            omega_plus.push(omega0 + 4.0 * a2 * (m + 0.5));
            omega_minus.push(-omega0 + 4.0 * a2 * (-m + 0.5));
            b_plus.push(4.0 * a2 * a2 * (half_n - m));
            b_minus.push(4.0 * a2 * a2 * (half_n + m));
        }
        ModifiedPictureParams {
            n_bath: n,
            omega0,
            a1,
            a2,
            beta: profile.beta(),
            omega_plus,
            omega_minus,
            b_plus,
            b_minus,
        }
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega_plus(&self, sector: Sector) -> f64 {
        self.omega_plus[sector.up_count(self.n_bath).expect("sector in range")]
    }

    pub fn omega_minus(&self, sector: Sector) -> f64 {
        self.omega_minus[sector.up_count(self.n_bath).expect("sector in range")]
    }

    pub fn b_plus(&self, sector: Sector) -> f64 {
        self.b_plus[sector.up_count(self.n_bath).expect("sector in range")]
    }

    pub fn b_minus(&self, sector: Sector) -> f64 {
        self.b_minus[sector.up_count(self.n_bath).expect("sector in range")]
    }

    /// Dephasing prefactor (N^2 - 4m^2)/(N - 1) * (A2^2 - A1^2); zero for a
    /// single bath spin where A1 = A2 identically.
    fn kappa(&self, up: usize) -> f64 {
        if self.n_bath < 2 {
            return 0.0;
        }
        let n = self.n_bath as f64;
        let two_m = 2.0 * up as f64 - n;
        (n * n - two_m * two_m) / (n - 1.0) * (self.a2 * self.a2 - self.a1 * self.a1)
    }

    /// Coherence exponent Lambda^coh_m(t), rotating frame included.
    pub fn lambda_coh(&self, sector: Sector, t: f64) -> Complex64 {
        let up = sector.up_count(self.n_bath).expect("sector in range");
        let m = sector.m();
        let first_order = Complex64::new(0.0, 4.0 * self.a1 * m * t);
        let gaussian = Complex64::from(2.0 * self.kappa(up) * t * t);
        let plus = self.b_plus[up] * line_double_integral(self.omega_plus[up], t);
        let minus = self.b_minus[up] * line_double_integral(-self.omega_minus[up], t);
        first_order + gaussian + plus + minus
    }

    /// Population exponent Lambda^pop_m(t) = 8 A2^2 (N+1) (1 - cos(Omega_+ t))
    /// / Omega_+^2; explicitly nonnegative.
    pub fn lambda_pop(&self, sector: Sector, t: f64) -> f64 {
        let up = sector.up_count(self.n_bath).expect("sector in range");
        let amp = 8.0 * self.a2 * self.a2 * (self.n_bath as f64 + 1.0);
        amp * one_minus_cos_over_w2(self.omega_plus[up], t)
    }
}

/// (1 - cos(w t)) / w^2 with the small-|w t| series branch.
fn one_minus_cos_over_w2(w: f64, t: f64) -> f64 {
    let x = w * t;
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        // t^2 (1/2 - x^2/24 + x^4/720 - x^6/40320)
        t * t * (0.5 - x2 / 24.0 + x2 * x2 / 720.0 - x2 * x2 * x2 / 40320.0)
    } else {
        (1.0 - x.cos()) / (w * w)
    }
}

/// Rotating-frame coherence with explicit per-sector initial coherences
/// (indexed by up-spin count): C(t) = sum_m c_m(0) exp(-Lambda^coh_m(t)).
pub fn coherence_general(
    params: &ModifiedPictureParams,
    c_m0: &[Complex64],
    times: &[f64],
) -> Vec<Complex64> {
    let n = params.n_bath;
    times
        .iter()
        .map(|&t| {
            (0..=n)
                .map(|up| {
                    let c0 = c_m0[up];
                    if c0.norm_sqr() == 0.0 {
                        return Complex64::ZERO;
                    }
                    c0 * (-params.lambda_coh(Sector::from_up_count(up, n), t)).exp()
                })
                .sum()
        })
        .collect()
}

/// Rotating-frame coherence for the unpolarized bath with total initial
/// coherence `c0`: sector weights N_m / 2^N.
pub fn coherence(params: &ModifiedPictureParams, c0: Complex64, times: &[f64]) -> Vec<Complex64> {
    let n = params.n_bath;
    let norm = (1u64 << n) as f64;
    let weights: Vec<Complex64> = (0..=n)
        .map(|up| c0 * (binomial(n, up) as f64 / norm))
        .collect();
    coherence_general(params, &weights, times)
}

/// Analytic population for the excited-state/unpolarized regime:
/// P_+(t) = sum_m N_m/2^N [ (N/2+m+1)/(N+1) + (N/2-m)/(N+1) e^{-Lambda^pop_m} ].
pub fn population(params: &ModifiedPictureParams, times: &[f64]) -> Vec<f64> {
    let n = params.n_bath;
    let nf = n as f64;
    let norm = (1u64 << n) as f64;
    times
        .iter()
        .map(|&t| {
            (0..=n)
                .map(|up| {
                    let m = up as f64 - nf / 2.0;
                    let weight = binomial(n, up) as f64 / norm;
                    let steady = (nf / 2.0 + m + 1.0) / (nf + 1.0);
                    let decaying = (nf / 2.0 - m) / (nf + 1.0);
                    let lam = params.lambda_pop(Sector::from_up_count(up, n), t);
                    weight * (steady + decaying * (-lam).exp())
                })
                .sum()
        })
        .collect()
}

/// Large-bath approximation P_+(t) = 1 - beta^2 [1 - exp(-2 N A2^2 t^2)
/// cos(omega0 t)], valid for small beta.
pub fn population_large_n(profile: &CouplingProfile, times: &[f64]) -> Vec<f64> {
    let beta2 = profile.beta() * profile.beta();
    let n = profile.n_bath() as f64;
    let a2sq = profile.a2() * profile.a2();
    let omega0 = profile.omega0();
    times
        .iter()
        .map(|&t| 1.0 - beta2 * (1.0 - (-2.0 * n * a2sq * t * t).exp() * (omega0 * t).cos()))
        .collect()
}

/// Direct adaptive integration of the modified-picture block equations.
/// Requires at least two bath spins (the dephasing prefactor divides by N-1).
pub fn integrate_blocks(
    params: &ModifiedPictureParams,
    initial: &BlockDensity,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<BlockTrajectory> {
    let n = params.n_bath;
    if n < 2 {
        return Err(Error::UnsupportedState(
            "modified-picture block integration needs N >= 2 (the dephasing prefactor divides by N - 1)".into(),
        ));
    }
    if initial.n_bath() != n {
        return Err(Error::invalid(
            "initial",
            format!(
                "bath size {} does not match parameters {}",
                initial.n_bath(),
                n
            ),
        ));
    }
    let y0 = blocks_to_state(initial);
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        for up in 0..=n {
            let m = up as f64 - n as f64 / 2.0;
            let i_plus = line_single_integral(params.omega_plus[up], t);
            let i_minus = line_single_integral(params.omega_minus[up], t);
            let s_plus = 2.0 * i_plus.re;
            let s_minus = 2.0 * i_minus.re;
            let base = 4 * up;
            let gain00 = if up < n {
                // B_-(m+1) * int 2cos(Omega_+(m) tau); Omega_-(m+1) = -Omega_+(m)
                params.b_minus[up + 1]
                    * 2.0
                    * line_single_integral(params.omega_minus[up + 1], t).re
                    * y[4 * (up + 1) + 3]
            } else {
                Complex64::ZERO
            };
            let gain11 = if up >= 1 {
                params.b_plus[up - 1]
                    * 2.0
                    * line_single_integral(params.omega_plus[up - 1], t).re
                    * y[4 * (up - 1)]
            } else {
                Complex64::ZERO
            };
            dy[base] = gain00 - params.b_plus[up] * s_plus * y[base];
            dy[base + 3] = gain11 - params.b_minus[up] * s_minus * y[base + 3];
            let coeff = Complex64::new(0.0, 4.0 * m * (params.a2 - params.a1))
                - 4.0 * params.kappa(up) * t
                - params.b_plus[up] * i_plus
                - params.b_minus[up] * i_minus.conj();
            dy[base + 1] = coeff * y[base + 1];
            dy[base + 2] = coeff.conj() * y[base + 2];
        }
    };
    let states = integrate(rhs, 0.0, &y0, times, opts)?;
    Ok(BlockTrajectory {
        times: times.to_vec(),
        states: states.into_iter().map(|y| state_to_blocks(n, &y)).collect(),
    })
}

/// Rotating-frame coherence from a modified-picture block trajectory: the
/// sector transform is sharp, C(t) = sum_m C_m(t) exp(-4 i A2 m t).
pub fn rotating_coherence(
    params: &ModifiedPictureParams,
    traj: &BlockTrajectory,
) -> Vec<Complex64> {
    let n = params.n_bath;
    traj.times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            traj.states[i]
                .blocks()
                .iter()
                .enumerate()
                .map(|(up, b)| {
                    let m = up as f64 - n as f64 / 2.0;
                    b[(0, 1)] * Complex64::new(0.0, -4.0 * params.a2 * m * t).exp()
                })
                .sum()
        })
        .collect()
}

/// Full record for the modified picture: closed-form coherence; population
/// from the closed form in its regime, otherwise from block integration.
pub fn trajectory(
    profile: &CouplingProfile,
    initial: &BlockDensity,
    times: &[f64],
) -> Result<TrajectoryRecord> {
    let params = ModifiedPictureParams::from_profile(profile);
    let c_m0: Vec<Complex64> = initial.blocks().iter().map(|b| b[(0, 1)]).collect();
    let coh = coherence_general(&params, &c_m0, times);
    let pop = if initial.is_excited_unpolarized() {
        population(&params, times)
    } else {
        integrate_blocks(&params, initial, times, &OdeOptions::default())?.population()
    };
    Ok(assemble_record(
        times,
        &coh,
        pop,
        Method::Tcl2Mod,
        model_fingerprint(profile, initial),
    ))
}

/// Record for the large-N population approximation. The formula describes
/// only the population; coherence entries are NaN.
pub fn trajectory_large_n(profile: &CouplingProfile, times: &[f64]) -> TrajectoryRecord {
    TrajectoryRecord {
        times: times.to_vec(),
        coherence_re: vec![f64::NAN; times.len()],
        coherence_im: vec![f64::NAN; times.len()],
        population: population_large_n(profile, times),
        method: Method::LargeN,
        fingerprint: profile_fingerprint(profile, "largen-excited-unpolarized"),
    }
}
