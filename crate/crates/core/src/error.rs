use thiserror::Error;

/// Error type shared by every module of the crate.
///
/// Variants map onto outcome categories; the CLI turns them into exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("polynomial vanishes at interval endpoint {0}")]
    EndpointRoot(String),
    #[error("refinement budget exhausted: {0}")]
    Budget(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("classification error: {0}")]
    Classification(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("resource limit reached: {0}")]
    Resource(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("generator check failed: {0}")]
    Generator(String),
    #[error("symmetry does not preserve the sail: {0}")]
    Symmetry(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
