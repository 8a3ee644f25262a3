use thiserror::Error;

/// Errors raised by the library. Discrepancies found by the verification
/// routines are reported as data, not as errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level must be positive, got {0}")]
    ZeroLevel(i64),
    #[error("({e1},{e2}) is not a coset representative for level {l}")]
    BadRep { e1: i64, e2: i64, l: i64 },
    #[error("intersection points of ℓ_{0} with itself are not transverse; use hom_rank")]
    NonTransverse(i64),
    #[error("indices must satisfy i < j < k, got ({0},{1},{2})")]
    BadTriple(i64, i64, i64),
    #[error("tau must lie in (0,1), got {0}")]
    TauOutOfRange(f64),
    #[error("point is not in the interior of the polytope")]
    NotInterior,
    #[error("tiles ({0},{1}) and ({2},{3}) are not adjacent")]
    NotAdjacent(i64, i64, i64, i64),
    #[error("candidate class has degree data outside the window: {0}")]
    IncompleteDegrees(String),
    #[error("point lies on a region boundary: {0}")]
    OnBoundary(String),
    #[error("unknown chart label: {0}")]
    UnknownChart(String),
    #[error("product term at x-exponent ({0},{1}) does not match any basis section")]
    OutsideSupport(i64, i64),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
