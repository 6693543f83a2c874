use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: tensor has n = {expected}, configuration has n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid spin value {0} (expected -1 or +1)")]
    InvalidSpin(i64),

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("operation not supported for {storage} storage: {what}")]
    UnsupportedStorage { storage: &'static str, what: &'static str },

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    Guard { what: &'static str, value: u128, limit: u128 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("confidence interval undefined: {0}")]
    IntervalUndefined(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
