use thiserror::Error;

/// Domain errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {value} at position {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("probability {value} at position {index} is within {margin:e} of the boundary")]
    NotInterior {
        index: usize,
        value: f64,
        margin: f64,
    },

    #[error("input size {size} exceeds the enumeration limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("index {index} is out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),

    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("user count {0} is outside 1..=64")]
    InvalidUserCount(usize),

    #[error("rate {value} at position {index} is negative or not finite")]
    InvalidRate { index: usize, value: f64 },

    #[error("subset must be nonempty")]
    EmptySubset,

    #[error("direction needs two distinct indices in increasing order, got ({l}, {m})")]
    InvalidDirection { l: usize, m: usize },

    #[error("grid size {0} must be odd and at least 3")]
    InvalidGrid(usize),

    #[error("tolerance {0} must be positive and finite")]
    InvalidTolerance(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
