//! Shared oracles for integration tests: a dense full-Hilbert-space
//! propagator built on a Pade matrix exponential (independent of the library's
//! sector eigendecomposition) and a nested-Simpson double integral.

use nalgebra::DMatrix;
use num_complex::Complex64;
use spinbath::model::{binomial, BlockDensity, CouplingProfile};
use spinbath::{FrequencyComb, Mat2};

/// exp(A) by scaling-and-squaring with Pade(13) (Higham 2005 coefficients).
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let norm = matrix_1_norm(a);
    let theta13 = 5.371_920_351_148_152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let a_scaled = a * Complex64::from(1.0 / (1u64 << s) as f64);
    let mut result = pade13(&a_scaled);
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

fn pade13(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let eye = DMatrix::<Complex64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_inner =
        &a6 * Complex64::from(B[13]) + &a4 * Complex64::from(B[11]) + &a2 * Complex64::from(B[9]);
    let u = a
        * (&a6 * u_inner
            + &a6 * Complex64::from(B[7])
            + &a4 * Complex64::from(B[5])
            + &a2 * Complex64::from(B[3])
            + &eye * Complex64::from(B[1]));
    let v_inner =
        &a6 * Complex64::from(B[12]) + &a4 * Complex64::from(B[10]) + &a2 * Complex64::from(B[8]);
    let v = &a6 * v_inner
        + &a6 * Complex64::from(B[6])
        + &a4 * Complex64::from(B[4])
        + &a2 * Complex64::from(B[2])
        + &eye * Complex64::from(B[0]);
    let denom = &v - &u;
    let numer = &v + &u;
    denom
        .lu()
        .solve(&numer)
        .expect("Pade denominator is invertible")
}

fn matrix_1_norm(a: &DMatrix<Complex64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Full Hamiltonian of the central spin plus bath in the product basis
/// (central bit is the highest), dimension 2^(N+1).
pub fn dense_hamiltonian(profile: &CouplingProfile) -> DMatrix<Complex64> {
    let n = profile.n_bath();
    let dim = 1usize << (n + 1);
    let central_bit = 1u32 << n;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for state in 0..dim as u32 {
        let central_up = state & central_bit != 0;
        let mask = state & (central_bit - 1);
        let u = if central_up { 1.0 } else { -1.0 };
        let k3 = profile.k3_of_mask(mask);
        h[(state as usize, state as usize)] =
            Complex64::from(u * profile.omega0() / 2.0 + 2.0 * u * k3);
        if central_up {
            for k in 0..n {
                if mask >> k & 1 == 0 {
                    // 2 sigma_- K_+ : flip central down, bath spin k up
                    let target = (state & !central_bit) | (1 << k);
                    let v = Complex64::from(2.0 * profile.alpha(k));
                    h[(target as usize, state as usize)] = v;
                    h[(state as usize, target as usize)] = v;
                }
            }
        }
    }
    h
}

/// Dense initial density matrix sum_m rho_m x Pi_m / N_m.
pub fn dense_initial(profile: &CouplingProfile, blocks: &BlockDensity) -> DMatrix<Complex64> {
    let n = profile.n_bath();
    let dim = 1usize << (n + 1);
    let central_bit = 1u32 << n;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for mask in 0..central_bit {
        let up = mask.count_ones() as usize;
        let block = blocks.blocks()[up] * Complex64::from(1.0 / binomial(n, up) as f64);
        for (bi, bval) in [(true, 0usize), (false, 1usize)] {
            for (bj, bval2) in [(true, 0usize), (false, 1usize)] {
                let row = mask | if bi { central_bit } else { 0 };
                let col = mask | if bj { central_bit } else { 0 };
                rho[(row as usize, col as usize)] = block[(bval, bval2)];
            }
        }
    }
    rho
}

/// Reduced 2x2 state of the central spin from a dense total density matrix.
pub fn partial_trace_central(rho: &DMatrix<Complex64>, n_bath: usize) -> Mat2 {
    let central_bit = 1u32 << n_bath;
    let mut out = Mat2::zeros();
    for mask in 0..central_bit {
        for (bi, i) in [(true, 0usize), (false, 1usize)] {
            for (bj, j) in [(true, 0usize), (false, 1usize)] {
                let row = (mask | if bi { central_bit } else { 0 }) as usize;
                let col = (mask | if bj { central_bit } else { 0 }) as usize;
                out[(i, j)] += rho[(row, col)];
            }
        }
    }
    out
}

/// Lab-frame reduced state at time t via the dense propagator.
pub fn dense_reduced_at(profile: &CouplingProfile, initial: &BlockDensity, t: f64) -> Mat2 {
    let h = dense_hamiltonian(profile);
    let u = expm(&(&h * Complex64::new(0.0, -t)));
    let rho0 = dense_initial(profile, initial);
    let rho_t = &u * rho0 * u.adjoint();
    partial_trace_central(&rho_t, profile.n_bath())
}

/// Composite-Simpson double time integral of a comb, using only pointwise
/// `eval`; `n_half` Simpson pairs.
pub fn simpson_double_integral(comb: &FrequencyComb, t: f64, n_half: usize) -> Complex64 {
    let n = 2 * n_half;
    let h = t / n as f64;
    let f: Vec<Complex64> = (0..=n).map(|i| comb.eval(i as f64 * h)).collect();
    let mut inner = vec![Complex64::ZERO; n + 1];
    for i in (2..=n).step_by(2) {
        inner[i] = inner[i - 2] + (f[i - 2] + 4.0 * f[i - 1] + f[i]) * (h / 3.0);
    }
    for i in (1..=n).step_by(2) {
        inner[i] = inner[i - 1] + (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]) * (h / 12.0);
    }
    let mut outer = Complex64::ZERO;
    for i in (2..=n).step_by(2) {
        outer += (inner[i - 2] + 4.0 * inner[i - 1] + inner[i]) * (h / 3.0);
    }
    outer
}
