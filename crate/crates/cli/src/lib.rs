//! Library side of the `spinbath` command-line harness.
//!
//! Everything the binary does — configuration resolution, scenario runs,
//! CSV/manifest/report emission and the self-check suite — lives here so it
//! can be tested directly.

pub mod check;
pub mod config;
pub mod csvio;
pub mod report;
pub mod scenario;

/// Process exit codes: 0 success, 1 validation error, 2 solver failure,
/// 3 self-check failure.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Solver(String),
    CheckFailed(usize),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Solver(_) => 2,
            CliError::CheckFailed(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Solver(msg) => write!(f, "solver failure: {msg}"),
            CliError::CheckFailed(n) => write!(f, "{n} self-check(s) failed"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
