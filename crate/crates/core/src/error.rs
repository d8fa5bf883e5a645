use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("non-finite penalty at index {0}")]
    NonFinitePenalty(usize),

    /// Empty support or a vanishing gradient on the support.
    #[error("degenerate step: {0}")]
    Degenerate(&'static str),

    #[error("rank-deficient search direction")]
    RankDeficientDirection,

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
