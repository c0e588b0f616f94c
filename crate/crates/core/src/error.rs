use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A request needs more digits of C10 than the configured budget allows.
    #[error("digit budget exceeded: {required} digits required, budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },

    #[error("{op} requires HWM number >= {min}, got {got}")]
    HwmOutOfRange {
        op: &'static str,
        min: u32,
        got: u32,
    },

    #[error("position 0 is the leading '0' and has no generating integer")]
    LeadingZeroPosition,

    #[error("integer must be >= 1")]
    ZeroInteger,

    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("{0} is not below 1")]
    NotProperFraction(&'static str),

    /// The digit prefix handed to the numerator construction is too short.
    #[error(
        "insufficient precision: position {required} (P_N) required, prefix ends at {available}"
    )]
    InsufficientPrefix { required: u64, available: u64 },

    /// The truth digits end before the quantity being measured is resolved.
    #[error("insufficient truth digits: {required} required, {available} available")]
    InsufficientTruth { required: u64, available: u64 },

    #[error("invalid coefficient list: {0}")]
    InvalidCoefficients(String),

    #[error("malformed input at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid scientific decimal: {0}")]
    InvalidSciDecimal(String),

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    /// Classification could not place the predicted 2nd-generation length.
    #[error("anchor failure in interval after HWM #{hwm}: predicted child length {predicted} matches no cluster")]
    AnchorFailure { hwm: u32, predicted: u64 },

    #[error("coefficient index {index} out of range (list has {len} terms)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
