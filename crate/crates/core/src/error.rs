use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A structural invariant failed; `path` locates the offending element.
    #[error("validation failed at {path}: {message}")]
    Validation { path: String, message: String },

    /// An exponential enumeration exceeded its configured cap.
    #[error("resource limit exceeded: {what} exceeds limit {limit}")]
    Resource { what: String, limit: usize },

    #[error("digraph has a cycle through {0:?}")]
    Cycle(Vec<String>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }

    pub fn resource(what: impl Into<String>, limit: usize) -> Self {
        Error::Resource {
            what: what.into(),
            limit,
        }
    }

    pub fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
