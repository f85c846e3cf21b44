use thiserror::Error;

/// Errors produced by the kaczeros library.
#[derive(Debug, Error)]
pub enum KacError {
    #[error("Hurst index must lie strictly inside (0, 1), got {0}")]
    InvalidHurst(f64),

    #[error("polynomial length must be at least 1")]
    EmptyLength,

    #[error("{what} = {value} is outside the supported domain ({domain})")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{0}")]
    Unsupported(&'static str),

    #[error("Cholesky pivot {pivot:e} at index {index} is below the tolerated threshold")]
    CholeskyPivot { index: usize, pivot: f64 },

    #[error(
        "Cauchy-Schwarz violation at x = {x}: delta = {delta:e} exceeds roundoff allowance {allowance:e}"
    )]
    CauchySchwarz { x: f64, delta: f64, allowance: f64 },

    #[error("quadrature did not converge after {evaluations} evaluations (error estimate {abs_err:e}, target {target:e})")]
    NonConvergence {
        evaluations: usize,
        abs_err: f64,
        target: f64,
    },

    #[error("the zero polynomial has no well-defined root count")]
    ZeroPolynomial,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl KacError {
    /// True for errors caused by bad user input rather than numerics or I/O.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            KacError::InvalidHurst(_)
                | KacError::EmptyLength
                | KacError::OutOfDomain { .. }
                | KacError::Unsupported(_)
                | KacError::Config(_)
                | KacError::Json(_)
        )
    }
}

pub type Result<T, E = KacError> = std::result::Result<T, E>;
