use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion elements belong to different algebras")]
    AlgebraMismatch,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("no admissible (lambda, mu) pair in the order for p = {p}")]
    NoAdmissiblePair { p: u64 },

    #[error("class number is not one for p = {p}: {detail}")]
    ClassNumberNotOne { p: u64, detail: String },

    #[error("degree mismatch: expected {expected} coset representatives, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid similitude: {0}")]
    InvalidSimilitude(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("no eigenform records for level {level}, weight {weight}")]
    DataMissing { level: u64, weight: u64 },

    #[error("new space has dimension {dim}, so the trace is not a single eigenvalue (power traces: {power_traces:?})")]
    AmbiguousEigenvalue {
        dim: i64,
        power_traces: Vec<Rational>,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid record: {0}")]
    Validation(String),

    #[error("unsupported ramified prime {0}; expected one of 2, 3, 5, 7, 11")]
    UnsupportedPrime(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
