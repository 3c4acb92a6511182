use std::io;

use crate::expsums::BoundReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{a} is not invertible modulo {q}")]
    NonInvertible { a: i128, q: u64 },

    #[error("parameters outside the exact-arithmetic window: {0}")]
    Overflow(String),

    #[error("enumeration would scan {candidates} candidates (limit {limit})")]
    EnumerationOverflow { candidates: u64, limit: u64 },

    #[error("bound violated: {0}")]
    BoundViolated(Box<BoundReport>),

    #[error("quadrature did not reach tolerance: estimate {estimate}, error {error_estimate}")]
    QuadratureFailure { estimate: f64, error_estimate: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
