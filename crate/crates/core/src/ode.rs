//! Embedded Dormand-Prince 5(4) integrator over complex state vectors.
//!
//! Classic adaptive RK with FSAL and a standard step-size controller; steps
//! are clipped to land exactly on requested output times, so no interpolation
//! error enters the reported trajectory.

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights are the last row of A (FSAL); error weights b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate dy/dt = rhs(t, y) from `t0`, reporting the state at each of the
/// ascending output times `t_out` (each >= `t0`).
pub fn integrate<F>(
    mut rhs: F,
    t0: f64,
    y0: &[Complex64],
    t_out: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<Complex64>>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let dim = y0.len();
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.first().is_some_and(|&t| t < t0) {
        return Err(Error::invalid(
            "times",
            "must be ascending and start at or after t0",
        ));
    }
    let mut out = Vec::with_capacity(t_out.len());
    let mut y = y0.to_vec();
    let mut t = t0;

    let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![Complex64::ZERO; dim]).collect();
    let mut y_stage = vec![Complex64::ZERO; dim];
    let mut y_new = vec![Complex64::ZERO; dim];

    let reached = |t: f64, target: f64| target <= t + 1e-14 * t.abs().max(1.0);

    let mut out_idx = 0;
    while out_idx < t_out.len() && reached(t, t_out[out_idx]) {
        out.push(y.clone());
        out_idx += 1;
    }
    if out_idx == t_out.len() {
        return Ok(out);
    }

    rhs(t, &y, &mut k[0]);
    let mut h = {
        let (k0, rest) = k.split_at_mut(1);
        initial_step(&mut rhs, t, &y, &k0[0], &mut rest[0], opts)
    };
    let t_end = *t_out.last().unwrap();
    let mut steps = 0usize;

    while out_idx < t_out.len() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::IntegratorFailure {
                t,
                step: h,
                steps,
                reason: "maximum step count exceeded".into(),
            });
        }
        let dist = t_out[out_idx] - t;
        let h_step = h.min(dist);
        if h_step < 1e-13 * t.abs().max(1.0) {
            return Err(Error::IntegratorFailure {
                t,
                step: h_step,
                steps,
                reason: "step size underflow while meeting tolerances".into(),
            });
        }

        // stages 2..7 (k[0] already holds f(t, y))
        for s in 0..6 {
            let (done, todo) = k.split_at_mut(s + 1);
            for i in 0..dim {
                let mut acc = Complex64::ZERO;
                for (j, k_j) in done.iter().enumerate() {
                    acc += k_j[i] * A[s][j];
                }
                y_stage[i] = y[i] + acc * h_step;
            }
            rhs(t + C[s + 1] * h_step, &y_stage, &mut todo[0]);
        }
        // fifth-order solution: weights are A[5] over k1..k6
        for i in 0..dim {
            let mut acc = Complex64::ZERO;
            for (j, k_j) in k.iter().take(6).enumerate() {
                acc += k_j[i] * A[5][j];
            }
            y_new[i] = y[i] + acc * h_step;
        }
        // embedded error estimate
        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = Complex64::ZERO;
            for (j, k_j) in k.iter().enumerate() {
                e += k_j[i] * E[j];
            }
            let e = e * h_step;
            let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let r = e.norm() / scale;
            err_sq += r * r;
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 {
            t += h_step;
            std::mem::swap(&mut y, &mut y_new);
            // FSAL: the stage evaluated at (t, y) seeds the next step
            rhs(t, &y, &mut k[6]);
            k.swap(0, 6);
            while out_idx < t_out.len() && reached(t, t_out[out_idx]) {
                out.push(y.clone());
                out_idx += 1;
            }
            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h = (h_step * fac).min(t_end - t0);
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            h = h_step * fac;
        }
    }
    Ok(out)
}

/// Rough initial step size from the scaled magnitudes of y0, f0 and a probe
/// Euler step (Hairer-style hinit, simplified).
fn initial_step<F>(
    rhs: &mut F,
    t0: f64,
    y0: &[Complex64],
    f0: &[Complex64],
    scratch: &mut [Complex64],
    opts: &OdeOptions,
) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let dim = y0.len() as f64;
    let scaled_rms = |v: &[Complex64], y: &[Complex64]| {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(vi, yi)| {
                let sc = opts.atol + opts.rtol * yi.norm();
                (vi.norm() / sc).powi(2)
            })
            .sum();
        (s / dim).sqrt()
    };
    let d0 = scaled_rms(y0, y0);
    let d1 = scaled_rms(f0, y0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    // probe step to estimate the second derivative scale
    let y1: Vec<Complex64> = y0.iter().zip(f0).map(|(y, f)| y + f * h0).collect();
    rhs(t0 + h0, &y1, scratch);
    let d2 = {
        let s: f64 = scratch
            .iter()
            .zip(f0)
            .zip(y0)
            .map(|((f1, f), y)| {
                let sc = opts.atol + opts.rtol * y.norm();
                ((f1 - f).norm() / sc).powi(2)
            })
            .sum();
        (s / dim).sqrt() / h0
    };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}
