use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("information size {k} out of range 1..={len}")]
    InfoSizeOutOfRange { k: usize, len: usize },

    #[error("tree depth must be between 1 and 24, got {0}")]
    DepthOutOfRange(usize),

    #[error("invalid frozen set: {0}")]
    InvalidFrozenSet(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{name} out of domain: {value} (requires {requirement})")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid CRC polynomial: {0}")]
    InvalidCrc(String),

    #[error("CRC of length {crc} leaves no room for information in K = {k}")]
    CrcTooLong { crc: usize, k: usize },

    #[error("epsilon = {epsilon}, c = {c} and n = {n} violate Q(c) <= 1 - epsilon^(1/2^n)")]
    InfeasibleTa { epsilon: f64, c: f64, n: usize },

    #[error("descriptor mismatch: {0}")]
    Descriptor(String),

    #[error("multi-stage decoding requires a code with CRC")]
    CrcRequired,

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("invalid stop rule: {0}")]
    InvalidStopRule(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            requirement,
        }
    }
}
