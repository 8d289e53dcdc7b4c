use thiserror::Error;

#[derive(Debug, Error)]
pub enum MorreyError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error("oracle size guard: {cells} cells exceeds limit {limit} (set allow_large to override)")]
    OracleSizeGuard { cells: usize, limit: usize },

    #[error("exponent relation violated: {0}")]
    ExponentRelation(String),

    #[error("unknown kernel '{0}'")]
    UnknownKernel(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = MorreyError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> MorreyError {
    MorreyError::InvalidParameter(msg.into())
}
