use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid hyperparameters or dimensions.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input data does not satisfy an operation's preconditions.
    #[error("input error: {0}")]
    Input(String),
    /// Malformed dataset file.
    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },
    /// An internal invariant was broken.
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
