use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested value lies outside the natural domain of a functional or operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid packing specification: {0}")]
    InvalidSpec(String),

    /// A source does not belong to the class required by a check.
    #[error("class mismatch: {0}")]
    Class(String),

    #[error("Beltrami coefficient violates |mu| <= k < 1 (k = {k})")]
    DistortionBound { k: f64 },

    #[error("Neumann iteration stalled after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("invalid analytic family: {0}")]
    InvalidFamily(String),

    #[error("field format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
