use std::io;

use crate::solver::SolverReport;

/// Errors produced by the solver, generators and instance I/O.
#[derive(Debug, thiserror::Error)]
pub enum RsumError {
    /// An input violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The surviving candidate count exceeded the threshold and no fallback
    /// was configured. Carries everything measured up to that point.
    #[error("capacity exceeded: {variants} candidate variants above threshold {threshold}")]
    Capacity {
        variants: u64,
        threshold: f64,
        report: Box<SolverReport>,
    },

    /// Internal tables disagree with each other.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// A generator could not produce an instance with the requested shape.
    #[error("generation error: {0}")]
    Generation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl RsumError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        RsumError::Domain(msg.into())
    }
}

pub type Result<T, E = RsumError> = std::result::Result<T, E>;
