use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),

    #[error("working precision must be at least 1")]
    ZeroPrecision,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("{value} is divisible by p = {p}")]
    NotCoprime { value: String, p: u64 },

    #[error("operands live in different p-adic contexts")]
    ContextMismatch,

    #[error("mu-invariant is positive within the working window (N = {trunc}, M = {prec})")]
    MuPositive { trunc: usize, prec: u32 },

    #[error("truncation order {have} is below the required {need}")]
    InsufficientTruncation { need: usize, have: usize },

    #[error("component k = {k} is excluded (k must be odd and k != 1 mod p-1)")]
    ExcludedComponent { k: i64 },

    #[error("node {l} is not congruent to k = {k} mod p-1, or is not a negative odd integer")]
    WrongCongruenceClass { l: i64, k: i64 },

    #[error("Bernoulli index {index} exceeds configured bound {bound}")]
    BoundExceeded { index: usize, bound: usize },

    #[error("no Stickelberger convention matched the interpolation data (tried {attempted})")]
    CalibrationFailure { attempted: String },

    #[error("exponential sum did not reduce to a rational integer")]
    NonIntegerSum,

    #[error("grading is not respected: {0}")]
    EquivarianceViolation(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("sequence did not stabilize over the supplied m-range")]
    NotStabilized,

    #[error("{0} is not a power of p")]
    NotPPower(String),

    #[error("enumeration of {pairs} pairs exceeds bound {bound}")]
    EnumerationBound { pairs: u128, bound: u128 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl Error {
    pub fn exhausted(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }
}
