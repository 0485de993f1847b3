use thiserror::Error;

/// Errors raised by model validation and by operations whose preconditions fail.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid walk model: {0}")]
    InvalidWalk(String),

    #[error("invalid scenery: {0}")]
    InvalidScenery(String),

    #[error("assumption (A2) violated: {moment} is {value}")]
    MomentViolation { moment: &'static str, value: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of bounds for trajectory of {steps} steps")]
    IndexOutOfBounds { index: usize, steps: usize },

    #[error("horizon mismatch: {left} vs {right}")]
    HorizonMismatch { left: usize, right: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("experiment precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
