use thiserror::Error;

/// Errors raised by the laboratory. Every variant names the level or
/// quantity at which the computation stopped.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid continued fraction: {0}")]
    InvalidContinuedFraction(String),

    #[error("integer overflow computing convergents at level {level}")]
    ConvergentOverflow { level: usize },

    #[error("requested level {requested} but only {available} levels are available")]
    InsufficientDepth { requested: usize, available: usize },

    #[error("rotation number does not match the continued fraction prefix at level {level}")]
    InconsistentRotation { level: usize },

    #[error("rational rotation number: closest return hits zero at level {level}")]
    RationalRotation { level: usize },

    #[error("depth exceeds precision at level {level} (length {length:e})")]
    DepthExceedsPrecision { level: usize, length: f64 },

    #[error("precision budget exceeded for orbit index {index}")]
    PrecisionBudget { index: i64 },

    #[error("invalid decimal literal: {0}")]
    InvalidDecimal(String),

    #[error("critical point: {0}")]
    CriticalPoint(String),

    #[error("orbit budget of {budget} iterates exhausted; partial continued fraction {partial:?}")]
    OrbitBudget { budget: usize, partial: Vec<u64> },

    #[error("tuning failed: bracket collapsed below {width:e}, deepest matched level {matched}")]
    TuningFailed { width: f64, matched: usize },

    #[error("structural mismatch at level {level}: {detail}")]
    Structure { level: usize, detail: String },

    #[error("invalid quadruple: {0}")]
    InvalidQuadruple(String),

    #[error("quadrature failed to converge within {budget} subdivisions (error estimate {estimate:e})")]
    Quadrature { budget: usize, estimate: f64 },

    #[error("order of size cannot be certified: {0}; increase depth")]
    OrderOfSize(String),

    #[error("requires μ sampling")]
    RequiresMuSampling,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
