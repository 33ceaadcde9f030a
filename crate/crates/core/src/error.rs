use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not a valid {kind}: residual {residual:.3e}")]
    InvalidElement { kind: &'static str, residual: f64 },

    #[error("matrix is numerically singular")]
    SingularInput,

    #[error("quadrature degree {requested} exceeds the supported maximum {max}")]
    DegreeExceeded { requested: usize, max: usize },

    #[error("linear kernel is empty")]
    EmptyKernel,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("spin cutoff too small: {0}")]
    InsufficientCutoff(String),

    #[error("ground energy not converged in the cutoff: shift {shift:.3e} exceeds {tol:.3e}")]
    NotConverged { shift: f64, tol: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
