use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// The CLI maps `Numerical` to exit code 2 and every other variant to 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unsupported shape: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
