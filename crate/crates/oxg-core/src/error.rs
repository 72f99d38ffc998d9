//! Error type shared by every module of the crate.

use std::error::Error;
use std::fmt;

/// Errors produced by distribution construction and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum OxgError {
    /// A distribution or policy parameter violates its domain (e.g. a
    /// nonpositive scale).
    InvalidParameter(String),
    /// An evaluation argument is outside the domain of the operation
    /// (e.g. a probability outside (0,1), or a point outside the support).
    Domain(String),
    /// The odds transform G/(1-G) is infinite because the point sits at or
    /// above the upper support endpoint. Distinct from [`OxgError::Domain`]
    /// so callers that want the limiting behaviour can catch it.
    InfiniteOdds,
    /// A dataset is unusable: empty, unparseable, or containing observations
    /// outside the candidate support.
    Data(String),
    /// A numerical procedure (series truncation, quadrature, optimizer,
    /// root finder) failed to converge within its budget.
    NonConvergence(String),
    /// The requested method/argument combination is not supported
    /// (e.g. a series evaluation that only exists for some baselines).
    Unsupported(String),
}

impl fmt::Display for OxgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OxgError::InvalidParameter(msg) => write!(f, "invalid parameter: {}", msg),
            OxgError::Domain(msg) => write!(f, "domain error: {}", msg),
            OxgError::InfiniteOdds => {
                write!(f, "odds are infinite at or above the upper support endpoint")
            }
            OxgError::Data(msg) => write!(f, "data error: {}", msg),
            OxgError::NonConvergence(msg) => write!(f, "non-convergence: {}", msg),
            OxgError::Unsupported(msg) => write!(f, "unsupported: {}", msg),
        }
    }
}

impl Error for OxgError {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, OxgError>;
