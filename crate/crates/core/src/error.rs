use thiserror::Error;

/// Errors produced by builders, parsers and the index file codec.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} out of range {lo}..={hi}")]
    Range { index: usize, lo: usize, hi: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("input size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
