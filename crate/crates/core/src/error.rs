use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("boundary value {value} at x={at} is not within {tolerance} of an integer")]
    BoundaryNotInteger { at: f64, value: f64, tolerance: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("cutoff t={t} out of range for n={n}")]
    CutoffOutOfRange { n: usize, t: usize },

    #[error("structural violation: {0}")]
    StructuralViolation(String),

    #[error("invalid Hoelder exponent {0}; expected 0 < alpha <= 1")]
    InvalidAlpha(f64),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),

    #[error("modulus is an empirical estimate; an analytic modulus is required")]
    EstimateOnlyModulus,

    #[error("integer coefficient overflow: {0}")]
    Overflow(String),

    #[error("invalid table: {0}")]
    Table(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
