use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),
    #[error("cyclotomic depth {needed} required, ring has depth {available}")]
    InsufficientDepth { needed: u32, available: u32 },
    #[error("operands live in different coefficient rings")]
    ContextMismatch,
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("duplicate exponent {0}")]
    DuplicateExponent(String),
    #[error("exponent {exponent} has depth {depth} above the bound {bound}")]
    DepthExceedsBound {
        exponent: String,
        depth: u32,
        bound: u32,
    },
    #[error("negative exponent {0} in a non-Laurent series")]
    NegativeExponent(String),
    #[error("exponent {exponent} lies beyond the degree bound {bound}")]
    BeyondDegreeBound { exponent: String, bound: String },
    #[error("{0} is not a power of p")]
    NotPowerOfP(i64),
    #[error("fractional exponent {0} where an integer exponent is required")]
    FractionalExponent(String),
    #[error("Laurent input outside the domain of {0}")]
    LaurentInput(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("j-value with valuation {0} is not the inverse of a topologically nilpotent parameter")]
    NotNilpotent(String),
    #[error("d = {0} is not a unit mod p; the decomposition is undefined")]
    DecompositionUndefined(u64),
    #[error("matrix precisions {0} and {1} differ")]
    PrecisionMismatch(u32, u32),
    #[error("tower incompatible at index {index}: {detail}")]
    TowerIncompatible { index: usize, detail: String },
    #[error("depth overflow: need depth {needed}, bound is {bound}")]
    DepthOverflow { needed: u32, bound: u32 },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
