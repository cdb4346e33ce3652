//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a rational number: {0:?}")]
    InvalidRational(String),
    #[error("halfspace system is unbounded")]
    Unbounded,
    #[error("halfspace system is infeasible")]
    Empty,
    #[error("region is not full-dimensional (affine hull has dimension {actual} < {expected})")]
    LowDimensional { expected: usize, actual: usize },
    #[error("vertex {0} is not integral")]
    NonIntegralVertex(String),
    #[error("facet index {index} out of range (polytope has {count} facets)")]
    BadIndex { index: usize, count: usize },
    #[error("divisor references facet index {index} out of range ({count} facets)")]
    BadFacetIndex { index: usize, count: usize },
    #[error("{0}")]
    DomainMismatch(String),
    #[error("piecewise-linear function has scale {got}, expected {expected}")]
    ScaleMismatch { expected: u64, got: u64 },
    #[error("size cap exceeded: {0}")]
    TooLarge(String),
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
    #[error("function is not convex: value at {0} lies above the convex envelope")]
    NotConvex(String),
    #[error("creases of the test function live at scale {function_scale}, incompatible with requested scale {requested}")]
    CreaseMismatch { function_scale: u64, requested: u64 },
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
