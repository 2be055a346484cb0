use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input sequence")]
    EmptyInput,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("unknown channel label '{0}'")]
    UnknownChannel(String),
    #[error("malformed channel data at line {line}: {reason}")]
    ChannelData { line: usize, reason: String },
    #[error("odd number of bits ({0}) cannot be QPSK-mapped")]
    OddBitCount(usize),
    #[error("invalid puncture pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid interleaver: {0}")]
    InvalidInterleaver(String),
    #[error("noise variance must be positive, got {0}")]
    NonPositiveNoise(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
