use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polytope is unbounded along coordinate {0}")]
    Unbounded(usize),

    #[error("slice height {t} outside 0..={b}")]
    SliceOutOfRange { t: u64, b: u64 },

    #[error("twist parameter n = {got} not accepted here (expected n = {expected})")]
    TwistMismatch { expected: u64, got: u64 },

    #[error("sequence too short: need at least {needed} values, got {got}")]
    SequenceTooShort { needed: usize, got: usize },

    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("closed form produced a non-integral value: {0}")]
    NonIntegral(String),
}
