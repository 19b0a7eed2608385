use thiserror::Error;

/// Errors produced anywhere in the core library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{h} exceeds the configured maximum {max}")]
    FieldTooLarge { p: u64, h: u32, max: u64 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("element code {code} out of range for GF({q})")]
    ElementOutOfRange { code: u64, q: u32 },
    #[error("division by zero in GF({q})")]
    DivisionByZero { q: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("linear form must be nonzero")]
    ZeroForm,

    #[error("not an arc: points {0:?} are linearly dependent")]
    NotAnArc(Vec<usize>),
    #[error("invalid arc parameters: {0}")]
    InvalidParameters(String),
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("malformed Segre query at position {position}: {reason}")]
    MalformedQuery { position: usize, reason: String },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("no valid configuration exists for this arc")]
    NoValidConfiguration,

    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
