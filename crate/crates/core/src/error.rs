use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("{what} did not converge: estimate {estimate:e}, error bound {error_bound:e} ({detail})")]
    Convergence {
        what: String,
        estimate: f64,
        error_bound: f64,
        detail: String,
    },

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("precision loss: {0}")]
    Precision(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
