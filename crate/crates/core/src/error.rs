use crate::secant::FrameFailure;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tuple budget exceeded: {tuples} tuples > budget {budget}; use the Monte Carlo estimator")]
    BudgetExceeded { tuples: u128, budget: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("secant frame construction failed: {}", describe_failures(.0))]
    SecantFailure(Vec<FrameFailure>),

    #[error("row {row}: {message}")]
    Parse { row: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn describe_failures(failures: &[FrameFailure]) -> String {
    failures
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
