use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unbounded feasible region without truncation box")]
    Unbounded,
    #[error("point is infeasible: {0}")]
    Infeasible(String),
    #[error("unknown catalog id `{id}`; valid ids: {valid}")]
    UnknownCatalog { id: String, valid: String },
    #[error("expression error: {0}")]
    Expr(String),
    #[error("problem spec error: {0}")]
    Spec(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("strong duality self-check failed: {0}")]
    Duality(String),
    #[error("catalog entry `{0}` has no local polyhedral models")]
    NoModels(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Spec(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
