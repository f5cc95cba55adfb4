use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Bessel order {0} outside the supported range |nu| <= 64")]
    OrderOutOfRange(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("classically forbidden point: mu - V = {margin:e} is below {eps:e}")]
    ForbiddenRegion { margin: f64, eps: f64 },

    #[error("zero separation; use the diagonal evaluator")]
    DegenerateSeparation,

    #[error("separation must be positive, got {0}")]
    NonpositiveSeparation(f64),

    #[error("quadrature not converged: relative change {change:e} exceeds {tolerance:e}")]
    QuadratureNotConverged { change: f64, tolerance: f64 },

    #[error("contour inversion not converged: relative change {change:e} exceeds {tolerance:e}")]
    ContourNotConverged { change: f64, tolerance: f64 },

    #[error("model unsupported: {0}")]
    ModelUnsupported(String),

    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
