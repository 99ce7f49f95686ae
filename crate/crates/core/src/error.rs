use thiserror::Error;

/// Errors surfaced by the workbench.
///
/// The variants map one-to-one onto the CLI exit codes: input problems,
/// refused requests that exceed a tractability guard, and internal
/// consistency alarms (two exact computations that should agree did not).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("refused: {0}")]
    Guard(String),
    #[error("internal consistency alarm: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn guard(msg: impl Into<String>) -> Self {
        Error::Guard(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
