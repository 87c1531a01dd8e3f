use thiserror::Error;

/// Errors surfaced by the library.
///
/// Numerical routines distinguish between *caller* errors (bad domain,
/// malformed potential description) and *solver* errors (an integral or
/// ODE run that failed to reach its tolerance, a quantity that is not
/// finite). Callers that sweep over many inputs can match on the variant
/// to decide whether a failure is retryable at looser tolerance.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A potential description that cannot represent a valid weight.
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// A computation finished but could not certify the requested accuracy.
    #[error("accuracy not reached: {0}")]
    Accuracy(String),

    /// Quadrature or ODE integration failed outright.
    #[error("integration failure in {location}: {reason}")]
    Integration { location: String, reason: String },

    /// A non-finite value appeared where a finite one is required.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Not enough data points to evaluate a statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A regression or fit was requested on degenerate data.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// The requested spectral quantity does not exist (e.g. essential
    /// spectrum where a discrete eigenvalue was asked for).
    #[error("not discrete: {0}")]
    NotDiscrete(String),

    /// Text input that does not parse as a potential or sequence.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
