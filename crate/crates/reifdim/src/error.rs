use thiserror::Error;

/// Crate-wide error type. `Input` covers contract violations (bad dimensions,
/// out-of-range parameters, scales below the sampling floor); everything else
/// is I/O or serialization plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for `Error::Input` with formatting.
#[macro_export]
macro_rules! input_error {
    ($($arg:tt)*) => {
        $crate::Error::Input(format!($($arg)*))
    };
}
