use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid partial quotients: {0}")]
    InvalidQuotients(String),

    #[error("partial quotients exhausted: index {requested} requested, only {available} available")]
    QuotientsExhausted { requested: usize, available: usize },

    #[error("insufficient precision: convergent order {required} required (got {given})")]
    InsufficientPrecision { required: usize, given: usize },

    #[error("shadow not certified: horizon {required} required, shadow covers {horizon}")]
    HorizonExceeded { required: u64, horizon: u64 },

    #[error("shadow rational could not be certified: {0}")]
    ShadowFailure(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("grid denominator overflow: {0}")]
    GridOverflow(String),

    #[error("interval enclosure too wide at {bits} bits: {what}")]
    Precision { bits: u32, what: String },

    #[error("standing hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Precision and horizon failures are recoverable by asking for more work.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::InsufficientPrecision { .. }
                | Error::HorizonExceeded { .. }
                | Error::ShadowFailure(_)
                | Error::GridOverflow(_)
                | Error::Precision { .. }
        )
    }
}
