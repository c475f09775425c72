use thiserror::Error;

use crate::harness::ViolationRecord;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid local dimension {0} (must be at least 2)")]
    InvalidDimension(usize),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is not one (|Tr - 1| = {0:e})")]
    TraceNotOne(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPSD(f64),

    #[error("state is not normalized (|norm^2 - 1| = {0:e})")]
    NotNormalized(f64),

    #[error("Weyl index ({a}, {b}) out of range for n = {n}")]
    IndexOutOfRange { n: usize, a: usize, b: usize },

    #[error("seed state is not maximally entangled (max reduced-state deviation {0:e})")]
    NotMaximallyEntangled(f64),

    #[error("not a probability vector: {0}")]
    NotProbabilityVector(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { dim: usize, rank: usize },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("theorem violation: {0}")]
    TheoremViolation(Box<ViolationRecord>),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
