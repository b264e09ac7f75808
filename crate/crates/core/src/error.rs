use thiserror::Error;

/// Errors raised by the operator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument out of domain ({msg})")]
    Domain { func: &'static str, msg: String },

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureNonConvergence {
        estimate: f64,
        error_estimate: f64,
        tolerance: f64,
    },

    #[error("degenerate weight: denominator {value:e} for k = {k} is below 1e-300")]
    DegenerateWeight { k: usize, value: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("empty sample")]
    EmptySample,

    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(func: &'static str, msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain { func, msg: msg.into() })
}
