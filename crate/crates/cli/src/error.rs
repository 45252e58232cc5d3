use thiserror::Error;

use setprop_core::error::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("numeric: {0}")]
    Numeric(#[from] CoreError),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    /// Core errors raised while reading inputs belong to the config class.
    pub fn from_input(e: CoreError, origin: &str) -> CliError {
        match e {
            CoreError::Io(m) => CliError::Io(m),
            other => CliError::Config(format!("{origin}: {other}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
