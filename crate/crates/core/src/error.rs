use thiserror::Error;

/// Errors raised by the computational modules and the file parsers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),

    #[error("operation requires a finite (non-truncated) ring")]
    NotFinite,

    #[error("fusion graph is not connected")]
    NotConnected,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid family spec: {0}")]
    InvalidSpec(String),

    #[error("empty window")]
    EmptyWindow,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("mass on ({k}, {l}) where the multiplicity is zero")]
    SupportViolation { k: usize, l: usize },

    #[error("matrix is zero")]
    ZeroMatrix,

    #[error("relative entropy is infinite: {0}")]
    InfiniteEntropy(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
