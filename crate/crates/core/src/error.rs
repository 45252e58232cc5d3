use thiserror::Error;

/// Errors raised by the set-propagation engine and its supporting numerics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error("non-finite value in {context}{}", step.map(|k| format!(" at step {k}")).unwrap_or_default())]
    NonFinite {
        context: &'static str,
        step: Option<usize>,
    },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported query: {0}")]
    UnsupportedQuery(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("inconsistent estimate: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
