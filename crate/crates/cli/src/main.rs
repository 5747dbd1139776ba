use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinbath_cli::config::{ConfigOverlay, ScenarioConfig};
use spinbath_cli::csvio::emit_csv;
use spinbath_cli::scenario::run_scenario;
use spinbath_cli::{check, CliError};

/// Central spin-1/2 in a nonuniform Heisenberg spin bath: exact propagation
/// versus second-order TCL master equations, emitted as CSV trajectories.
#[derive(Parser)]
#[command(name = "spinbath", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScenarioFlags {
    /// Config file with `key = value` lines; flags override it
    config: Option<PathBuf>,
    /// Number of bath spins
    #[arg(long)]
    n_bath: Option<usize>,
    /// Coupling strength alpha0/omega0
    #[arg(long)]
    alpha_ratio: Option<f64>,
    /// Profile width k0 (default N/2)
    #[arg(long)]
    k0: Option<f64>,
    /// Profile exponent (default 2)
    #[arg(long)]
    exponent: Option<f64>,
    /// Initial state: superposition, excited or custom
    #[arg(long)]
    initial: Option<String>,
    /// End of the time grid, in units of 1/omega0
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points (>= 2)
    #[arg(long)]
    points: Option<usize>,
    /// Comma list of methods: exact,tcl2,tcl2mod,largen
    #[arg(long)]
    methods: Option<String>,
    /// Output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Comparison window `lo,hi` for the report
    #[arg(long)]
    window: Option<String>,
}

impl ScenarioFlags {
    fn overlay(&self) -> ConfigOverlay {
        ConfigOverlay {
            n_bath: self.n_bath,
            alpha_ratio: self.alpha_ratio,
            k0: self.k0,
            exponent: self.exponent,
            initial: self.initial.clone(),
            t_max: self.t_max,
            n_points: self.points,
            methods: self.methods.clone(),
            out_dir: self.out_dir.clone(),
            window: self.window.clone(),
            ..ConfigOverlay::default()
        }
    }

    fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let file_layer = match &self.config {
            Some(path) => ConfigOverlay::from_file(path)?,
            None => ConfigOverlay::default(),
        };
        file_layer.merged_with(self.overlay()).resolve()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write CSV trajectories, manifest and report
    Run(ScenarioFlags),
    /// Run a grid of scenarios over bath sizes and coupling ratios
    Sweep {
        #[command(flatten)]
        flags: ScenarioFlags,
        /// Comma list of bath sizes
        #[arg(long)]
        n_baths: String,
        /// Comma list of alpha0/omega0 values
        #[arg(long)]
        alpha_ratios: String,
    },
    /// Run the invariant self-check suite and print pass/fail lines
    Check,
}

fn run_one(config: &ScenarioConfig) -> Result<(), CliError> {
    let output = run_scenario(config)?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    if output.records.is_empty() {
        eprintln!("warning: no records produced; writing manifest only");
    }
    let written = emit_csv(
        &output.records,
        &config.out_dir,
        &config.echo(),
        output.fingerprint,
    )?;
    let report_text = output.report.render();
    let report_path = config.out_dir.join("report.txt");
    std::fs::write(&report_path, &report_text)
        .map_err(|e| CliError::Io(format!("write {}: {e}", report_path.display())))?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    println!("wrote {}", report_path.display());
    print!("{report_text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(flags) => {
            let config = flags.resolve()?;
            run_one(&config)
        }
        Command::Sweep {
            flags,
            n_baths,
            alpha_ratios,
        } => {
            let ns: Vec<usize> = n_baths
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::Validation(format!("n_baths: bad value `{s}`")))
                })
                .collect::<Result<_, _>>()?;
            let alphas: Vec<f64> = alpha_ratios
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::Validation(format!("alpha_ratios: bad value `{s}`")))
                })
                .collect::<Result<_, _>>()?;
            let base = flags.resolve()?;
            // validate the whole grid before running any point
            let mut grid = Vec::new();
            for &n in &ns {
                for &alpha in &alphas {
                    let mut config = base.clone();
                    config.n_bath = n;
                    config.alpha_ratio = alpha;
                    if flags.k0.is_none() {
                        config.k0 = n as f64 / 2.0;
                    }
                    config.out_dir = base.out_dir.join(format!("n{n}_a{alpha}"));
                    config.validate()?;
                    grid.push(config);
                }
            }
            for config in &grid {
                println!(
                    "== scenario n_bath={} alpha_ratio={} -> {}",
                    config.n_bath,
                    config.alpha_ratio,
                    config.out_dir.display()
                );
                run_one(config)?;
            }
            Ok(())
        }
        Command::Check => {
            let failures = check::run_checks();
            if failures == 0 {
                println!("all checks passed");
                Ok(())
            } else {
                Err(CliError::CheckFailed(failures))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
