use thiserror::Error;

/// Errors produced by the Gaussian-state toolbox.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// A symplectic eigenvalue (or determinant) violates the uncertainty principle.
    #[error("unphysical covariance matrix: {0}")]
    Unphysical(String),

    #[error("invariants do not correspond to a physical spectrum: {0}")]
    InconsistentInvariants(String),

    /// The closed-form displacement matrix needs an invertible generator.
    #[error("matrix is singular or ill-conditioned (condition number {condition:e}); use the quadrature route")]
    Singular { condition: f64 },

    #[error("eigen-solver failed to converge")]
    EigenSolver,

    #[error("linear program is infeasible: {0}")]
    Infeasible(String),

    #[error("invariant violation at sample {sample}: {reason}")]
    InvariantViolation { sample: u64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
