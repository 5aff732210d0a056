use thiserror::Error;

/// Errors raised by the library.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("capacity exceeded: {required} cells required but the budget allows {budget}")]
    Capacity { required: u128, budget: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
