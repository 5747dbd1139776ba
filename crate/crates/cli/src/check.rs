//! `spinbath check`: fast invariant suite over every solver module.
//!
//! Small-instance versions of the full acceptance tests; prints one PASS or
//! FAIL line per check. The heavyweight N = 10 comparisons live in the
//! `acceptance` test target of the core crate.

use num_complex::Complex64;
use spinbath::model::{binomial, BathSpec, BlockDensity, CouplingProfile, SectorTable};
use spinbath::modified::{self, ModifiedPictureParams};
use spinbath::ode::OdeOptions;
use spinbath::spectra::{f_comb, g_comb};
use spinbath::{density_matrix_dim, ExactPropagator, FrequencyComb, Mat2, Tcl2Model};

type CheckResult = Result<String, String>;

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
    let table = SectorTable::build(profile).expect("within cap");
    BlockDensity::initial(rho, &BathSpec::Unpolarized, &table).expect("valid state")
}

fn check_beta() -> CheckResult {
    let profile = CouplingProfile::build(10, 1.0, 0.01, 5.0, 2.0).map_err(|e| e.to_string())?;
    let beta = profile.beta();
    let rounded = (beta * 100.0).round() / 100.0;
    if rounded == 0.03 {
        Ok(format!("beta = {beta:.5} rounds to 0.03"))
    } else {
        Err(format!("beta = {beta:.5} rounds to {rounded}"))
    }
}

fn check_density_dim() -> CheckResult {
    let d = density_matrix_dim(10);
    if d == 4_194_303 {
        Ok(format!("D(10) = {d}"))
    } else {
        Err(format!("D(10) = {d}, expected 4194303"))
    }
}

fn check_rabi() -> CheckResult {
    let alpha = 0.2;
    let profile = CouplingProfile::uniform(1, 1.0, alpha).map_err(|e| e.to_string())?;
    let prop = ExactPropagator::new(&profile).map_err(|e| e.to_string())?;
    let initial =
        BlockDensity::from_blocks(1, vec![plus(), Mat2::zeros()]).map_err(|e| e.to_string())?;
    let times: Vec<f64> = (0..400).map(|i| i as f64 * 0.05).collect();
    let rec = prop.evolve(&initial, &times).map_err(|e| e.to_string())?;
    let rabi_sq = 0.25 + 4.0 * alpha * alpha;
    let mut worst = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let expect = 1.0 - (4.0 * alpha * alpha / rabi_sq) * (rabi_sq.sqrt() * t).sin().powi(2);
        worst = worst.max((rec.population[i] - expect).abs());
    }
    if worst < 1e-10 {
        Ok(format!("N=1 Rabi dev {worst:.2e}"))
    } else {
        Err(format!("N=1 Rabi dev {worst:.2e} exceeds 1e-10"))
    }
}

fn check_sectors() -> CheckResult {
    let profile = CouplingProfile::gaussian(8, 1.0, 0.01).map_err(|e| e.to_string())?;
    let table = SectorTable::build(&profile).map_err(|e| e.to_string())?;
    let total: u64 = table.sectors().iter().map(|e| e.degeneracy).sum();
    if total != 256 {
        return Err(format!("sum of degeneracies {total} != 256"));
    }
    let mut seen = vec![false; 256];
    for entry in table.sectors() {
        if entry.degeneracy != binomial(8, entry.sector.up_count(8).unwrap()) {
            return Err(format!("degeneracy mismatch in sector {:?}", entry.sector));
        }
        for &mask in &entry.configs {
            if seen[mask as usize] {
                return Err(format!("duplicate mask {mask}"));
            }
            seen[mask as usize] = true;
        }
    }
    if seen.iter().all(|&s| s) {
        Ok("N=8 sectors complete, degeneracies binomial".into())
    } else {
        Err("masks missing from sector enumeration".into())
    }
}

fn check_uniform_collapse() -> CheckResult {
    let n = 6;
    let c = 0.02;
    let profile = CouplingProfile::uniform(n, 1.0, c).map_err(|e| e.to_string())?;
    let table = SectorTable::build(&profile).map_err(|e| e.to_string())?;
    let params = ModifiedPictureParams::from_profile(&profile);
    for entry in table.sectors() {
        let s = entry.sector;
        let f = f_comb(s, &profile, &table);
        let g = g_comb(s, &profile, &table);
        let checks = [
            (f, params.b_plus(s), params.omega_plus(s)),
            (g, params.b_minus(s), params.omega_minus(s)),
        ];
        for (comb, b, omega) in checks {
            if b == 0.0 {
                if !comb.is_empty() {
                    return Err(format!("sector {s:?}: expected empty comb"));
                }
                continue;
            }
            if comb.lines().len() != 1
                || (comb.lines()[0].omega - omega).abs() > 1e-14
                || (comb.lines()[0].weight.re - b).abs() > 1e-14
            {
                return Err(format!("sector {s:?}: comb did not collapse to (B, Omega)"));
            }
        }
    }
    Ok("uniform f/g combs equal the modified-picture lines".into())
}

fn check_picture_equivalence() -> CheckResult {
    let profile = CouplingProfile::uniform(6, 1.0, 0.01).map_err(|e| e.to_string())?;
    let params = ModifiedPictureParams::from_profile(&profile);
    let times: Vec<f64> = (0..=100).map(|i| i as f64 * 2.0).collect();

    let tcl2 = Tcl2Model::new(&profile, unpolarized(&profile, &superposition()))
        .map_err(|e| e.to_string())?;
    let c_full = tcl2.coherence(&times);
    let c_mod = modified::coherence(&params, Complex64::new(0.5, 0.0), &times);
    let dev_c = c_full
        .iter()
        .zip(&c_mod)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));

    let tcl2 =
        Tcl2Model::new(&profile, unpolarized(&profile, &plus())).map_err(|e| e.to_string())?;
    let p_full = tcl2.population(&times).map_err(|e| e.to_string())?;
    let p_mod = modified::population(&params, &times);
    let dev_p = p_full
        .iter()
        .zip(&p_mod)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    if dev_c < 1e-9 && dev_p < 1e-7 {
        Ok(format!(
            "uniform couplings: dev_C {dev_c:.2e}, dev_P {dev_p:.2e}"
        ))
    } else {
        Err(format!(
            "pictures disagree for uniform couplings: dev_C {dev_c:.2e}, dev_P {dev_p:.2e}"
        ))
    }
}

fn check_formula_vs_ode() -> CheckResult {
    let profile = CouplingProfile::gaussian(4, 1.0, 0.02).map_err(|e| e.to_string())?;
    let times: Vec<f64> = (0..=100).map(|i| i as f64).collect();
    let opts = OdeOptions::default();

    let model =
        Tcl2Model::new(&profile, unpolarized(&profile, &plus())).map_err(|e| e.to_string())?;
    let formula = model.population(&times).map_err(|e| e.to_string())?;
    let traj = model
        .integrate_blocks(&times, &opts)
        .map_err(|e| e.to_string())?;
    let dev_full = formula
        .iter()
        .zip(traj.population())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    // pair conservation and trace along the same trajectory
    let start = traj.sector_populations(0);
    let mut dev_pair = 0.0f64;
    let mut dev_trace = 0.0f64;
    for i in 0..times.len() {
        let now = traj.sector_populations(i);
        for up in 0..4 {
            dev_pair =
                dev_pair.max(((now[up].0 + now[up + 1].1) - (start[up].0 + start[up + 1].1)).abs());
        }
        dev_trace = dev_trace.max((traj.states[i].total_trace() - 1.0).abs());
    }

    let params = ModifiedPictureParams::from_profile(&profile);
    let initial = unpolarized(&profile, &plus());
    let traj_mod =
        modified::integrate_blocks(&params, &initial, &times, &opts).map_err(|e| e.to_string())?;
    let formula_mod = modified::population(&params, &times);
    let dev_mod = formula_mod
        .iter()
        .zip(traj_mod.population())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    if dev_full < 1e-7 && dev_mod < 1e-7 && dev_pair < 1e-9 && dev_trace < 1e-9 {
        Ok(format!(
            "formula-vs-ODE {dev_full:.2e}/{dev_mod:.2e}, pair conservation {dev_pair:.2e}"
        ))
    } else {
        Err(format!(
            "formula-vs-ODE {dev_full:.2e}/{dev_mod:.2e}, pair {dev_pair:.2e}, trace {dev_trace:.2e}"
        ))
    }
}

fn check_exact_conservation() -> CheckResult {
    let profile = CouplingProfile::gaussian(4, 1.0, 0.08).map_err(|e| e.to_string())?;
    let prop = ExactPropagator::new(&profile).map_err(|e| e.to_string())?;
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let psi = prop
        .product_state(amp, amp, 0b0101)
        .map_err(|e| e.to_string())?;
    let e0 = prop.energy(&psi);
    let sz0 = prop.total_sz(&psi);
    let mut worst = 0.0f64;
    for &t in &[1.0, 10.0, 100.0, 1000.0] {
        let evolved = prop.propagate(&psi, t);
        worst = worst.max((prop.norm(&evolved) - 1.0).abs());
        worst = worst.max((prop.energy(&evolved) - e0).abs() / e0.abs().max(1.0));
        worst = worst.max((prop.total_sz(&evolved) - sz0).abs() / sz0.abs().max(1.0));
    }
    // group property
    let direct = prop.propagate(&psi, 7.5);
    let composed = prop.propagate(&prop.propagate(&psi, 3.0), 4.5);
    let group_dev = (prop.reduced_state(&direct) - prop.reduced_state(&composed))
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    if worst < 1e-10 && group_dev < 1e-9 {
        Ok(format!(
            "norm/energy/Sz conserved to {worst:.2e}, group property {group_dev:.2e}"
        ))
    } else {
        Err(format!(
            "conservation dev {worst:.2e}, group dev {group_dev:.2e}"
        ))
    }
}

fn check_largen() -> CheckResult {
    for n in [10usize, 12] {
        let unit =
            CouplingProfile::build(n, 1.0, 1.0, n as f64 / 2.0, 2.0).map_err(|e| e.to_string())?;
        let alpha0 = 0.03 / (2.0 * (n as f64).sqrt() * unit.a2());
        let profile = CouplingProfile::build(n, 1.0, alpha0, n as f64 / 2.0, 2.0)
            .map_err(|e| e.to_string())?;
        let params = ModifiedPictureParams::from_profile(&profile);
        // pre-revival window: half the first revival period 2 pi / (4 A2)
        let t_max = std::f64::consts::PI / (4.0 * profile.a2());
        let times: Vec<f64> = (0..=1000).map(|i| i as f64 * t_max / 1000.0).collect();
        let pm = modified::population(&params, &times);
        let pl = modified::population_large_n(&profile, &times);
        let dev = pm
            .iter()
            .zip(&pl)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if dev > 5e-4 {
            return Err(format!("N={n}: large-N dev {dev:.2e} exceeds 5e-4"));
        }
    }
    Ok("large-N approximation within 5e-4 of the closed form (beta = 0.03)".into())
}

/// Nested composite-Simpson double integral, independent of the closed forms.
fn simpson_double(comb: &FrequencyComb, t: f64, n_half: usize) -> Complex64 {
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

fn check_quadrature() -> CheckResult {
    // fixed 5-line comb spanning the frequency range of the physical combs
    let comb = FrequencyComb::new(vec![
        (1.07, Complex64::new(0.31, 0.11)),
        (-0.63, Complex64::new(0.22, -0.05)),
        (0.015, Complex64::new(0.40, 0.0)),
        (2.31, Complex64::new(0.05, 0.17)),
        (-1.44, Complex64::new(0.13, 0.02)),
    ]);
    let t = 200.0;
    let closed = comb.double_integral(t);
    let quad = simpson_double(&comb, t, 120_000);
    let rel = (closed - quad).norm() / closed.norm();
    if rel < 1e-8 {
        Ok(format!(
            "double integral vs nested Simpson: rel dev {rel:.2e}"
        ))
    } else {
        Err(format!("quadrature mismatch: rel dev {rel:.2e}"))
    }
}

type NamedCheck = (&'static str, fn() -> CheckResult);

/// Run every check, print one line each; returns the number of failures.
pub fn run_checks() -> usize {
    let checks: Vec<NamedCheck> = vec![
        ("beta-reproduction", check_beta),
        ("state-space-dimension", check_density_dim),
        ("rabi-single-spin", check_rabi),
        ("sector-enumeration", check_sectors),
        ("uniform-comb-collapse", check_uniform_collapse),
        ("picture-equivalence", check_picture_equivalence),
        ("formula-vs-ode", check_formula_vs_ode),
        ("exact-conservation", check_exact_conservation),
        ("large-n-asymptotics", check_largen),
        ("quadrature-oracle", check_quadrature),
    ];
    let mut failures = 0;
    for (name, f) in checks {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    failures
}
