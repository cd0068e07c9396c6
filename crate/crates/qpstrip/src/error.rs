use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("window not admissible: {0}")]
    NotAdmissible(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unknown task: {0}")]
    UnknownTask(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code used in result records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Numeric(_) => "numeric",
            Error::IndexRange(_) => "index_range",
            Error::Singular(_) => "singular",
            Error::Precondition(_) => "precondition",
            Error::Degenerate(_) => "degenerate",
            Error::NotAdmissible(_) => "not_admissible",
            Error::Schema(_) => "schema",
            Error::UnknownTask(_) => "unknown_task",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
