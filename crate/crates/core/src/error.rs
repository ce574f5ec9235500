use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("invalid angular momentum label: {0}")]
    InvalidLabel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("malformed matrix input at row {row}, col {col}: {reason}")]
    MalformedMatrix { row: usize, col: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SpinError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(SpinError::Domain(msg.into()))
}
