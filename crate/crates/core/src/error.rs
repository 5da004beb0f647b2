use thiserror::Error;

/// Errors raised by the inference routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter outside its domain: {0}")]
    ParameterDomain(String),

    /// All particle weights vanished. `step` is the observation index (1-based)
    /// at which it happened, when known.
    #[error("particle weights degenerated{}", match .step { Some(t) => format!(" at step {t}"), None => String::new() })]
    Degeneracy { step: Option<usize> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("diagnostics: {0}")]
    Diagnostics(String),

    /// Malformed input data. `row` is the 1-based data row (header excluded).
    #[error("invalid input{}: {message}", match .row { Some(r) => format!(" at row {r}"), None => String::new() })]
    Input { row: Option<usize>, message: String },

    #[error("chain initialisation failed: {0}")]
    Initialization(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn input(row: Option<usize>, message: impl Into<String>) -> Self {
        Error::Input {
            row,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
