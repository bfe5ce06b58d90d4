use std::io;

use thiserror::Error;

/// Errors raised by the library. Contract violations are reported, never
/// silently coerced into a verdict.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("query model violation: {0}")]
    ModelViolation(String),

    #[error("query budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },

    #[error("distribution not normalized (total mass {0})")]
    NotNormalized(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("failed to generate a certified instance after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn capacity(what: impl Into<String>, limit: u64) -> Error {
    Error::Capacity {
        what: what.into(),
        limit,
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
