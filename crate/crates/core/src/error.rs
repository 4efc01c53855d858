//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the discretization and evolution layers.
///
/// `Config` covers everything a user can get wrong in an input file;
/// `InvariantViolation` marks a mathematically impossible outcome (for
/// example a second kernel vector) and is meant to abort a run;
/// `NonFinite` reports the first time step at which a solution stopped
/// being finite.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("config error: {0}")]
    Config(String),

    #[error("config error at line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("scientific invariant violated: {0}")]
    InvariantViolation(String),

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CoreError {
    pub fn config(msg: impl Into<String>) -> Self {
        CoreError::Config(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        CoreError::InvariantViolation(msg.into())
    }
}
