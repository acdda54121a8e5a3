use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected} outcomes, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("time value {value} at outcome {outcome} exceeds horizon {horizon}")]
    TimeOutOfRange {
        outcome: usize,
        value: usize,
        horizon: usize,
    },

    #[error("process is not adapted: first violation at t={time}, outcome {outcome}")]
    NotAdapted { time: usize, outcome: usize },

    #[error("process is not nondecreasing: first decrease at t={time}, outcome {outcome}")]
    NotMonotone { time: usize, outcome: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("stopping-time enumeration would produce {count} times, exceeding cap {cap}")]
    CapExceeded { cap: u64, count: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
