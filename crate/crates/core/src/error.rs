use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: at least one p-value is required")]
    EmptyInput,
    #[error("invalid score at index {index}: {value} is not a p-value in [0, 1]")]
    InvalidScore { index: usize, value: f64 },
    #[error("invalid size {0}: sizes must be at least 1")]
    InvalidSize(usize),
    #[error("invalid level {0}: alpha must lie in (0, 1)")]
    InvalidLevel(f64),
    #[error("invalid gamma {0}: the FDP bound must lie in [0, 1)")]
    InvalidGamma(f64),
    #[error("invalid exponent r = {0} for this backend")]
    InvalidExponent(f64),
    #[error("invalid subset: index {index} is outside 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("invalid subset: index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("the empirical-table backend has no inverse in alpha; adjusted p-values are unavailable")]
    UnsupportedInverse,
    #[error("calibration table does not cover the request: {0}")]
    TableMismatch(String),
    #[error("brute-force closure is limited to m <= {max}, got m = {m}")]
    OracleTooLarge { m: usize, max: usize },
    #[error("target {target} is outside the range of g on [-40, 40]")]
    OutOfRange { target: f64 },
    #[error("unsupported branch: {0}")]
    Unsupported(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("scores are not sorted in descending order at position {0}")]
    NotSorted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
