//! Crate-wide error type.

/// Errors surfaced by model construction, evaluation, and solving.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An integrand or sampled value came back NaN/infinite.
    #[error("non-finite value: {0}")]
    NonFiniteValue(String),

    /// A cost evaluation produced a NaN/infinite result.
    #[error("non-finite cost: {0}")]
    NonFiniteCost(String),

    /// Density-factor exponent left the representable range.
    #[error("density factor overflow: exponent {0}")]
    Overflow(f64),

    /// An observation kernel has no conditional-Gaussian description.
    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    #[error("unsupported variance: {0}")]
    UnsupportedVariance(String),

    /// Policy enumeration would exceed the configured cap.
    #[error("enumeration too large: {count} tables exceeds cap {cap}")]
    TooLarge { count: u128, cap: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),

    /// A schedule step failed; carries the step context.
    #[error("schedule step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration errors, 3 for
    /// numeric/runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            Error::Step { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
