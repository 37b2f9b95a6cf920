use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("resolvent is singular (smallest singular value {sigma_min:e})")]
    SingularResolvent { sigma_min: f64 },

    #[error("linear system is singular (smallest singular value {sigma_min:e})")]
    SingularSystem { sigma_min: f64 },

    #[error("eigenvalue {0} lies on the closed negative real axis")]
    NegativeRealEigenvalue(Complex64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("matrix exponential overflow: 1-norm {norm:e} requires {squarings} squarings")]
    Overflow { norm: f64, squarings: u32 },

    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("shift search failed: no shift up to {limit:e} satisfies the sector")]
    SearchFailed { limit: f64 },

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
