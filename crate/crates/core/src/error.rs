use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported root system: {0}")]
    Unsupported(String),
    #[error("weight basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("critical level: k + h^vee = 0 (k = {0})")]
    CriticalLevel(String),
    #[error("truncation insufficient: {0}")]
    Truncation(String),
    #[error("incompatible mode index: {0}")]
    IncompatibleMode(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
