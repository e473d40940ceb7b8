use thiserror::Error;

/// Errors surfaced by the geometry kernel, the simulators and the estimators.
#[derive(Debug, Error)]
pub enum SphereSplitError {
    /// A draw produced a configuration inside the numerical boundary band
    /// (vertex on the splitting hypersphere, tangency, ...). Such draws carry
    /// probability zero under a regular direction distribution; callers
    /// resample them.
    #[error("degenerate configuration within tolerance band: {0}")]
    Degenerate(String),

    #[error("dimension not supported by this operation: {0}")]
    UnsupportedDimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical routine failed to converge: {0}")]
    Convergence(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SphereSplitError>;
