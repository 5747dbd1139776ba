//! Second-order TCL master equation over the correlated sector projection,
//! in the interaction picture of the full diagonal Hamiltonian.
//!
//! The coherence of each sector decays with the double time integral of
//! f_m + g_m^* and picks up the sector dephasing average in the rotating
//! frame; the population for the excited initial state has a one-dimensional
//! integral representation solved here by composite Simpson on a grid tied
//! to the largest comb frequency. Arbitrary block initial states go through
//! direct adaptive integration of the coupled block equations.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
use crate::model::{BlockDensity, CouplingProfile, Sector, SectorTable};
use crate::ode::{integrate, OdeOptions};
use crate::spectra::{dephasing_comb, f_comb, g_comb, FrequencyComb};
use crate::trajectory::{model_fingerprint, BlockTrajectory, Method, TrajectoryRecord};
use crate::{Mat2, Result};

/// Convergence target for the population's remaining 1-d time integral.
const SIMPSON_TOL: f64 = 1e-9;
/// Fine-grid step rule: h * omega_max <= this.
const SIMPSON_PHASE_STEP: f64 = 0.1;

/// TCL2 model: correlation combs cached per sector plus the initial state.
pub struct Tcl2Model {
    profile: CouplingProfile,
    table: SectorTable,
    f_combs: Vec<FrequencyComb>,
    g_combs: Vec<FrequencyComb>,
    dephasing_combs: Vec<FrequencyComb>,
    /// f_m + g_m^* driving the coherence decay.
    coh_combs: Vec<FrequencyComb>,
    /// g_{m+1} + f_m driving the population decay (empty comb past the edge).
    pop_combs: Vec<FrequencyComb>,
    initial: BlockDensity,
    empty: FrequencyComb,
}

impl Tcl2Model {
    pub fn new(profile: &CouplingProfile, initial: BlockDensity) -> Result<Self> {
        let n = profile.n_bath();
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
        let table = SectorTable::build(profile)?;
        let sectors: Vec<Sector> = profile.sector_range().collect();
        let f_combs: Vec<FrequencyComb> = sectors
            .par_iter()
            .map(|&s| f_comb(s, profile, &table))
            .collect();
        let g_combs: Vec<FrequencyComb> = sectors
            .par_iter()
            .map(|&s| g_comb(s, profile, &table))
            .collect();
        let dephasing_combs: Vec<FrequencyComb> = sectors
            .par_iter()
            .map(|&s| dephasing_comb(s, profile, &table))
            .collect();
        let coh_combs: Vec<FrequencyComb> = (0..=n)
            .map(|up| FrequencyComb::sum(&[&f_combs[up], &g_combs[up].conjugate()]))
            .collect();
        let pop_combs: Vec<FrequencyComb> = (0..=n)
            .map(|up| {
                if up < n {
                    FrequencyComb::sum(&[&g_combs[up + 1], &f_combs[up]])
                } else {
                    f_combs[up].clone()
                }
            })
            .collect();
        Ok(Tcl2Model {
            profile: profile.clone(),
            table,
            f_combs,
            g_combs,
            dephasing_combs,
            coh_combs,
            pop_combs,
            initial,
            empty: FrequencyComb::empty(),
        })
    }

    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    pub fn initial(&self) -> &BlockDensity {
        &self.initial
    }

    pub fn table(&self) -> &SectorTable {
        &self.table
    }

    fn comb_at<'a>(&'a self, combs: &'a [FrequencyComb], sector: Sector) -> &'a FrequencyComb {
        sector
            .up_count(self.profile.n_bath())
            .map_or(&self.empty, |up| &combs[up])
    }

    pub fn f_comb(&self, sector: Sector) -> &FrequencyComb {
        self.comb_at(&self.f_combs, sector)
    }

    pub fn g_comb(&self, sector: Sector) -> &FrequencyComb {
        self.comb_at(&self.g_combs, sector)
    }

    pub fn dephasing_comb(&self, sector: Sector) -> &FrequencyComb {
        self.comb_at(&self.dephasing_combs, sector)
    }

    /// Coherence decay exponent: double time integral of f_m + g_m^*.
    pub fn lambda_coh(&self, sector: Sector, t: f64) -> Complex64 {
        self.comb_at(&self.coh_combs, sector).double_integral(t)
    }

    /// Population decay exponent: 2 Re of the double time integral of
    /// g_{m+1} + f_m.
    pub fn lambda_pop(&self, sector: Sector, t: f64) -> f64 {
        2.0 * self.comb_at(&self.pop_combs, sector).double_integral(t).re
    }

    /// Feeding rate mu_m(t) = 2 Re int_0^t g_{m+1}.
    pub fn mu(&self, sector: Sector, t: f64) -> f64 {
        2.0 * self
            .comb_at(&self.g_combs, sector.next_up())
            .single_integral(t)
            .re
    }

    /// Rotating-frame coherence: C(t) = sum_m C_m(0) <e^{-4iK3t}>_m
    /// exp(-Lambda_m(t)). Works for any block initial state.
    pub fn coherence(&self, times: &[f64]) -> Vec<Complex64> {
        let n = self.profile.n_bath();
        let per_sector: Vec<Vec<Complex64>> = (0..=n)
            .into_par_iter()
            .map(|up| {
                let c0 = self.initial.blocks()[up][(0, 1)];
                if c0.norm_sqr() == 0.0 {
                    return vec![Complex64::ZERO; times.len()];
                }
                let (lambda, deph) = match uniform_grid(times) {
                    Some((t0, dt)) => (
                        self.coh_combs[up].double_integral_grid(t0, dt, times.len()),
                        self.dephasing_combs[up].eval_grid(t0, dt, times.len()),
                    ),
                    None => (
                        times
                            .iter()
                            .map(|&t| self.coh_combs[up].double_integral(t))
                            .collect(),
                        times
                            .iter()
                            .map(|&t| self.dephasing_combs[up].eval(t))
                            .collect(),
                    ),
                };
                lambda
                    .iter()
                    .zip(&deph)
                    .map(|(l, d)| c0 * d * (-l).exp())
                    .collect()
            })
            .collect();
        let mut out = vec![Complex64::ZERO; times.len()];
        for series in &per_sector {
            for (o, v) in out.iter_mut().zip(series) {
                *o += v;
            }
        }
        out
    }

    /// Analytic population for the excited-state/unpolarized regime
    /// (P_+(0) = 1); other initial states must use [`Self::integrate_blocks`].
    pub fn population(&self, times: &[f64]) -> Result<Vec<f64>> {
        if !self.initial.is_excited_unpolarized() {
            return Err(Error::UnsupportedState(
                "population formula requires the |+><+| state with the unpolarized bath; \
                 use integrate_blocks for general initial conditions"
                    .into(),
            ));
        }
        if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
            return Err(Error::invalid("times", "must be ascending and nonnegative"));
        }
        if times.is_empty() {
            return Ok(Vec::new());
        }
        let n = self.profile.n_bath();
        let omega_max = (0..=n).fold(0.0f64, |acc, up| {
            acc.max(self.pop_combs[up].max_abs_omega())
                .max(self.g_combs[up].max_abs_omega())
        });
        if omega_max == 0.0 {
            return Ok(vec![1.0; times.len()]);
        }

        // output nodes always start from t = 0
        let mut nodes = Vec::with_capacity(times.len() + 1);
        nodes.push(0.0);
        nodes.extend_from_slice(times);

        let mut subdiv = 1usize;
        let mut prev: Option<Vec<f64>> = None;
        for _ in 0..12 {
            let current = self.population_on_nodes(&nodes, omega_max, subdiv)?;
            // drop the synthetic t = 0 node
            let current: Vec<f64> = current[1..].to_vec();
            if let Some(p) = &prev {
                let diff = p
                    .iter()
                    .zip(&current)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                if diff < SIMPSON_TOL {
                    return Ok(current);
                }
            }
            prev = Some(current);
            subdiv *= 2;
        }
        Err(Error::IntegratorFailure {
            t: *times.last().unwrap(),
            step: SIMPSON_PHASE_STEP / omega_max / subdiv as f64,
            steps: subdiv,
            reason: "population Simpson refinement did not converge".into(),
        })
    }

    /// Composite-Simpson evaluation of P_+ at `nodes` with `subdiv` times the
    /// base fine resolution. The inner integral of e^Lambda mu is carried
    /// between nodes with exponents kept relative to the local Lambda, so
    /// large decay exponents cannot overflow.
    fn population_on_nodes(
        &self,
        nodes: &[f64],
        omega_max: f64,
        subdiv: usize,
    ) -> Result<Vec<f64>> {
        let n = self.profile.n_bath();
        let h_max = SIMPSON_PHASE_STEP / omega_max;
        let norm = (1u64 << n) as f64;

        let per_sector: Vec<Vec<f64>> = (0..=n)
            .into_par_iter()
            .map(|up| {
                let pop = &self.pop_combs[up];
                let gee = if up < n {
                    &self.g_combs[up + 1]
                } else {
                    &self.empty
                };
                if pop.is_empty() && gee.is_empty() {
                    return vec![1.0; nodes.len()];
                }
                let mut out = Vec::with_capacity(nodes.len());
                out.push(1.0); // t = 0
                let mut s_rel = 0.0; // int_0^a e^{Lambda(u)-Lambda(a)} mu(u) du
                let mut lambda_a = 0.0;
                for w in nodes.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let len = b - a;
                    if len == 0.0 {
                        out.push(out.last().copied().unwrap());
                        continue;
                    }
                    let mut steps = (len / h_max).ceil() as usize * subdiv;
                    if steps % 2 == 1 {
                        steps += 1;
                    }
                    let steps = steps.max(2);
                    let h = len / steps as f64;
                    let dti = pop.double_integral_grid(a, h, steps + 1);
                    let si = gee.single_integral_grid(a, h, steps + 1);
                    let lambda_b = 2.0 * dti[steps].re;
                    // Simpson with every term weighted by exp(Lambda - Lambda_b)
                    let mut acc = 0.0;
                    for j in 0..=steps {
                        let weight = if j == 0 || j == steps {
                            1.0
                        } else if j % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        let lambda_j = 2.0 * dti[j].re;
                        let mu_j = 2.0 * si[j].re;
                        acc += weight * mu_j * (lambda_j - lambda_b).exp();
                    }
                    acc *= h / 3.0;
                    s_rel = s_rel * (lambda_a - lambda_b).exp() + acc;
                    lambda_a = lambda_b;
                    out.push((-lambda_b).exp() + s_rel);
                }
                out
            })
            .collect();

        let mut total = vec![0.0; nodes.len()];
        for (up, series) in per_sector.iter().enumerate() {
            let weight = self.table.sectors()[up].degeneracy as f64 / norm;
            for (t, v) in total.iter_mut().zip(series) {
                *t += weight * v;
            }
        }
        Ok(total)
    }

    /// Direct adaptive integration of the coupled block equations
    /// (interaction picture). Supports any valid block initial state.
    pub fn integrate_blocks(&self, times: &[f64], opts: &OdeOptions) -> Result<BlockTrajectory> {
        let n = self.profile.n_bath();
        let y0 = blocks_to_state(&self.initial);
        let n_sectors = n + 1;
        let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
            // single-time comb integrals per sector
            let rates: Vec<(Complex64, Complex64)> = (0..n_sectors)
                .into_par_iter()
                .map(|up| {
                    (
                        self.f_combs[up].single_integral(t),
                        self.g_combs[up].single_integral(t),
                    )
                })
                .collect();
            for up in 0..n_sectors {
                let (f, g) = rates[up];
                let rho = &y[4 * up..4 * up + 4];
                let base = 4 * up;
                // gain from the neighbouring blocks
                let gain00 = if up + 1 < n_sectors {
                    2.0 * rates[up + 1].1.re * y[4 * (up + 1) + 3]
                } else {
                    Complex64::ZERO
                };
                let gain11 = if up >= 1 {
                    2.0 * rates[up - 1].0.re * y[4 * (up - 1)]
                } else {
                    Complex64::ZERO
                };
                dy[base] = gain00 - 2.0 * f.re * rho[0];
                dy[base + 3] = gain11 - 2.0 * g.re * rho[3];
                dy[base + 1] = -(f + g.conj()) * rho[1];
                dy[base + 2] = -(f.conj() + g) * rho[2];
            }
        };
        let states = integrate(rhs, 0.0, &y0, times, opts)?;
        Ok(BlockTrajectory {
            times: times.to_vec(),
            states: states.into_iter().map(|y| state_to_blocks(n, &y)).collect(),
        })
    }

    /// Rotating-frame coherence extracted from a block trajectory by
    /// applying the sector dephasing average.
    pub fn rotating_coherence(&self, traj: &BlockTrajectory) -> Vec<Complex64> {
        traj.times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                traj.states[i]
                    .blocks()
                    .iter()
                    .enumerate()
                    .map(|(up, b)| b[(0, 1)] * self.dephasing_combs[up].eval(t))
                    .sum()
            })
            .collect()
    }

    /// Full record: analytic coherence plus the population from the analytic
    /// formula in its regime or from block integration otherwise.
    pub fn trajectory(&self, times: &[f64]) -> Result<TrajectoryRecord> {
        let coh = self.coherence(times);
        let pop = if self.initial.is_excited_unpolarized() {
            self.population(times)?
        } else {
            self.integrate_blocks(times, &OdeOptions::default())?
                .population()
        };
        Ok(assemble_record(
            times,
            &coh,
            pop,
            Method::Tcl2,
            model_fingerprint(&self.profile, &self.initial),
        ))
    }
}

/// Flatten blocks into the ODE state vector, ascending m, row-major 2x2.
pub(crate) fn blocks_to_state(blocks: &BlockDensity) -> Vec<Complex64> {
    let mut y = Vec::with_capacity(4 * blocks.blocks().len());
    for b in blocks.blocks() {
        y.extend_from_slice(&[b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]]);
    }
    y
}

pub(crate) fn state_to_blocks(n_bath: usize, y: &[Complex64]) -> BlockDensity {
    let blocks: Vec<Mat2> = (0..=n_bath)
        .map(|up| {
            let b = &y[4 * up..4 * up + 4];
            Mat2::new(b[0], b[1], b[2], b[3])
        })
        .collect();
    BlockDensity::from_raw(n_bath, blocks)
}

pub(crate) fn assemble_record(
    times: &[f64],
    coherence: &[Complex64],
    population: Vec<f64>,
    method: Method,
    fingerprint: u64,
) -> TrajectoryRecord {
    TrajectoryRecord {
        times: times.to_vec(),
        coherence_re: coherence.iter().map(|c| c.re).collect(),
        coherence_im: coherence.iter().map(|c| c.im).collect(),
        population,
        method,
        fingerprint,
    }
}

/// Detect a uniform time grid (enables the phasor-recurrence fast path).
pub(crate) fn uniform_grid(times: &[f64]) -> Option<(f64, f64)> {
    if times.len() < 3 {
        return times.first().map(|&t0| (t0, times.last().unwrap() - t0));
    }
    let dt = times[1] - times[0];
    let t0 = times[0];
    for (i, &t) in times.iter().enumerate() {
        let expect = t0 + dt * i as f64;
        if (t - expect).abs() > 1e-9 * t.abs().max(1.0) {
            return None;
        }
    }
    Some((t0, dt))
}
