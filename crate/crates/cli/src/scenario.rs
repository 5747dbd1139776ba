//! Dispatch a scenario to the requested solvers.

use std::time::Instant;

use spinbath::model::{BlockDensity, CouplingProfile, SectorTable};
use spinbath::{modified, ExactPropagator, Method, Tcl2Model, TrajectoryRecord};

use crate::config::ScenarioConfig;
use crate::report::{build_report, ComparisonReport, MethodTiming};
use crate::CliError;

pub struct ScenarioOutput {
    pub records: Vec<TrajectoryRecord>,
    pub report: ComparisonReport,
    pub fingerprint: u64,
    pub warnings: Vec<String>,
}

/// Build the model, run every requested method on the shared grid and
/// compute the pairwise comparison report.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput, CliError> {
    config.validate()?;
    let profile = CouplingProfile::build(
        config.n_bath,
        1.0,
        config.alpha_ratio,
        config.k0,
        config.exponent,
    )
    .map_err(|e| CliError::Validation(e.to_string()))?;
    let table = SectorTable::build(&profile).map_err(|e| CliError::Validation(e.to_string()))?;
    let initial = BlockDensity::initial(
        &config.initial.rho_s(),
        &config.initial.bath_spec()?,
        &table,
    )
    .map_err(|e| CliError::Validation(e.to_string()))?;
    let times = config.times();

    let mut warnings = Vec::new();
    if config.methods.contains(&Method::LargeN) && profile.beta() > 0.3 {
        warnings.push(format!(
            "beta = {:.3} exceeds 0.3; the large-N population formula degrades quickly there",
            profile.beta()
        ));
    }

    let mut records = Vec::with_capacity(config.methods.len());
    let mut timings = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let start = Instant::now();
        let record = match method {
            Method::Exact => {
                ExactPropagator::new(&profile).and_then(|prop| prop.evolve(&initial, &times))
            }
            Method::Tcl2 => {
                Tcl2Model::new(&profile, initial.clone()).and_then(|m| m.trajectory(&times))
            }
            Method::Tcl2Mod => modified::trajectory(&profile, &initial, &times),
            Method::LargeN => Ok(modified::trajectory_large_n(&profile, &times)),
        }
        .map_err(|e| CliError::Solver(format!("{method}: {e}")))?;
        timings.push(MethodTiming {
            method,
            seconds: start.elapsed().as_secs_f64(),
        });
        records.push(record);
    }

    let report = build_report(&records, timings, config.report_window());
    Ok(ScenarioOutput {
        records,
        report,
        fingerprint: spinbath::model_fingerprint(&profile, &initial),
        warnings,
    })
}
