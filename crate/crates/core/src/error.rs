use thiserror::Error;

use crate::copula::Family;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside the admissible domain ({domain})")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("theta = {theta} is not admissible for the {family} family")]
    InvalidTheta { family: Family, theta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(
        "conditional inversion did not converge (theta = {theta}, u = {u}, w = {w}) after {iterations} iterations"
    )]
    NonConvergence {
        theta: f64,
        u: f64,
        w: f64,
        iterations: usize,
    },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("fisher table format: {0}")]
    TableFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
