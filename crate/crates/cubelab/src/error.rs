use thiserror::Error;

/// Errors produced by cube-function construction, analytics, and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {n} out of supported range [1, {max}]")]
    DimensionOutOfRange { n: usize, max: usize },

    #[error("coordinate {coord} out of range for dimension {n} (coordinates are 1-based)")]
    CoordinateOutOfRange { coord: usize, n: usize },

    #[error("table length {got} does not match 2^{n} = {want}")]
    TableLengthMismatch { n: usize, got: usize, want: usize },

    #[error("hex truth table has {got} digits, expected {want} for n = {n}")]
    HexLengthMismatch { n: usize, got: usize, want: usize },

    #[error("invalid hex digit {0:?} in truth table")]
    HexDigit(char),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("negative value {value} at index {index} where a nonnegative function is required")]
    NegativeValue { index: usize, value: f64 },

    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("permutation {0:?} is not a bijection on 1..=n")]
    InvalidPermutation(Vec<usize>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("function spec parse error: {0}")]
    SpecParse(String),

    #[error("search space too large: {0} (pass the long-run option to override)")]
    SpaceTooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
