use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Lexer or parser failure at a source position (1-based).
    #[error("{msg} at line {line}, col {col}")]
    Syntax { msg: String, line: usize, col: usize },

    /// Malformed DDL or log file content, tagged with its 1-based line.
    #[error("{msg} at line {line}")]
    Input { msg: String, line: usize },

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Validation(String),

    /// A DELETE or undo row with no matching prior insert.
    #[error("retraction underflow: {0}")]
    RetractionUnderflow(String),

    /// Indicates a planner bug, never a user error.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn syntax(msg: impl Into<String>, line: usize, col: usize) -> Self {
        Error::Syntax { msg: msg.into(), line, col }
    }

    pub(crate) fn input(msg: impl Into<String>, line: usize) -> Self {
        Error::Input { msg: msg.into(), line }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
