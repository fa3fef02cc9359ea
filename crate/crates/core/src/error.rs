use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ackermann code needs {needed} bits, budget is {budget}")]
    BitBudget { needed: String, budget: u64 },

    #[error("sets containing atoms have no ackermann code")]
    AtomEncoding,

    #[error("resource cap exceeded at level {level}: {detail}")]
    ResourceCap { level: usize, detail: String },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid bound function: {0}")]
    InvalidBound(String),

    #[error("unsupported for this hierarchy: {0}")]
    Unsupported(String),

    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("cache: {0}")]
    Cache(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that stem from a configured resource limit.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::BitBudget { .. } | Error::ResourceCap { .. })
    }
}
