use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The target hypothesis fell out of the version space. The stream was
    /// not realizable for the declared class.
    #[error("realizability violated: {0}")]
    RealizabilityViolation(String),

    /// A label contradicts the noiseless linear model (dependent point with
    /// an inconsistent value).
    #[error("noise model violated: {0}")]
    NoiseModelViolation(String),

    /// No strictly feasible separator exists for the current constraints.
    #[error("infeasible version space: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// The harness could not interpret a configuration value. `location` is a
    /// dotted key path into the config document.
    #[error("config error at `{location}`: {message}")]
    Config { location: String, message: String },

    #[error("no hypothesis satisfies the constraint")]
    NoQualifyingHypothesis,

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
