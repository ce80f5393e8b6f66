use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input document. `path` is a JSON-pointer-like location.
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("formula parse error at column {column}: {message}")]
    Formula { column: usize, message: String },

    /// A value that does not fit the ambient game or structure.
    #[error("structural error: {0}")]
    Structure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A witness construction produced a structure that failed its own check.
    #[error("construction check failed: {0}")]
    Construction(String),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
