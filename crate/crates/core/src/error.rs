use thiserror::Error;

/// Errors raised by the geometry kernels, the normalization layers and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    /// Karcher flow did not reach its tolerance. Carries the last iterate
    /// (row-major entries) so callers can inspect or restart from it.
    #[error("convergence error: residual {residual:e} after {iterations} iterations")]
    ConvergenceError {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("cut locus: {0}")]
    CutLocusError(String),

    #[error("retraction failed: {0}")]
    RetractError(String),

    #[error("batch not contained in a geodesic ball of radius pi/2: {0}")]
    BallError(String),

    #[error("unsupported backend: {0}")]
    UnsupportedBackend(String),

    #[error("unknown domain id {0}")]
    UnknownDomain(usize),
}

impl Error {
    /// Stable variant name, used in diagnostics and CLI error messages.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::DomainError(_) => "DomainError",
            Error::InvalidMetric(_) => "InvalidMetric",
            Error::ConvergenceError { .. } => "ConvergenceError",
            Error::CutLocusError(_) => "CutLocusError",
            Error::RetractError(_) => "RetractError",
            Error::BallError(_) => "BallError",
            Error::UnsupportedBackend(_) => "UnsupportedBackend",
            Error::UnknownDomain(_) => "UnknownDomain",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
