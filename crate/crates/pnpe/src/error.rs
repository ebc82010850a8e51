//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A heralding branch carries zero probability.
    #[error("degenerate herald: {0}")]
    DegenerateHerald(String),

    /// Click probabilities violate a consistency requirement
    /// (e.g. a joint probability exceeding one of its marginals).
    #[error("inconsistent probabilities: {0}")]
    InconsistentProbabilities(String),

    /// A POVM element failed validation.
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    /// A threshold scan found no Bell violation over the whole interval.
    #[error("no violation: {0}")]
    NoViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
