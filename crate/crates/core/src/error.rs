use thiserror::Error;

/// Errors raised by the inference routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Observation length does not match the model dimension.
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Confidence-interval procedure parameters are inconsistent.
    #[error("invalid interval spec: {0}")]
    InvalidSpec(String),

    /// An interval was paired with a curve built from a different observation.
    #[error("interval was observed at d={interval_d} but the curve was built at d={curve_d}")]
    MismatchedObservation { interval_d: f64, curve_d: f64 },

    /// Root finding or quadrature did not converge.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
