use thiserror::Error;

/// Everything that can go wrong inside the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("shape mismatch: expected dimension {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("capacity exceeded: dimension {dim} is above the cap {cap}")]
    Capacity { dim: usize, cap: usize },
    #[error("no convergence after {iterations} iterations (best estimates {best:?})")]
    Convergence { iterations: usize, best: Vec<f64> },
    #[error("zero-energy resonance: u'(R) = {0:e}")]
    Resonance(f64),
    #[error("periodization overlap: support radius {support} needs to stay below pi * {scale}")]
    PeriodizationOverlap { support: f64, scale: u32 },
    #[error("near-degenerate ground state: gap {0:e}")]
    Degeneracy(f64),
    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { field: field.into(), message: message.into() }
    }
}
