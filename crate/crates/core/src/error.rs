//! Error type shared by every solver module.

/// Errors produced by model construction and the solvers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A constructor argument violates its precondition.
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    /// A request exceeds a hard size cap (bath enumeration, exact propagation).
    #[error("{what} for {requested} bath spins exceeds the cap of {cap}; {advice}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        cap: usize,
        advice: &'static str,
    },

    /// Input state is outside the family a solver supports.
    #[error("unsupported initial state: {0}")]
    UnsupportedState(String),

    /// The adaptive integrator could not satisfy its tolerances.
    #[error(
        "integrator failure at t = {t}: {reason} (last step h = {step:.3e} after {steps} steps)"
    )]
    IntegratorFailure {
        t: f64,
        step: f64,
        steps: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field,
            reason: reason.into(),
        }
    }
}
