//! Error types shared across the crate.

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A function that must stay positive dipped to or below the positivity floor.
    #[error("positivity violation in {context}: min value {min:.6e} is at or below floor {floor:.1e}")]
    PositivityViolation {
        context: &'static str,
        min: f64,
        floor: f64,
    },

    /// An operator was applied to a metric written in the wrong convention.
    #[error("convention mismatch: operator expects {expected} but metric is {got}")]
    ConventionMismatch {
        expected: &'static str,
        got: &'static str,
    },

    /// An iterative solver did not reach its tolerance.
    #[error("convergence failure in {context}: {detail}")]
    ConvergenceFailure {
        context: &'static str,
        detail: String,
    },

    /// A flow step violated positivity or the per-step change bound.
    #[error("step rejected: {0}")]
    StepRejected(String),

    /// Adaptive time stepping drove dt below the underflow limit.
    #[error("blow-up suspected: dt underflow below {0:.1e}")]
    BlowupSuspected(f64),

    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn positivity(context: &'static str, min: f64, floor: f64) -> Self {
        Error::PositivityViolation {
            context,
            min,
            floor,
        }
    }

    pub(crate) fn convergence(context: &'static str, detail: impl Into<String>) -> Self {
        Error::ConvergenceFailure {
            context,
            detail: detail.into(),
        }
    }
}
