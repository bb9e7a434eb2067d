use thiserror::Error;

/// Errors produced by the bound computations and the verification helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("alphabet size {b} exceeds the enumeration cap of {cap}")]
    TooLarge { b: usize, cap: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("configuration {0} has an empty feasible box")]
    EmptyBox(String),

    #[error("function is not nonincreasing: {0}")]
    NotMonotone(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("symbol {symbol} out of range 1..={b}")]
    SymbolOutOfRange { symbol: usize, b: usize },

    #[error("duplicate codeword at position {0}")]
    DuplicateWord(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
