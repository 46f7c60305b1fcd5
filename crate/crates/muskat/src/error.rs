use thiserror::Error;

/// Errors raised by the solver stack.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Geometry or data outside the admissible set (d < f < h, ellipticity, ...).
    #[error("domain error: {0}")]
    Domain(String),
    #[error("solver failure: {message} (condition estimate {condition:e})")]
    SolverFailure { message: String, condition: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
