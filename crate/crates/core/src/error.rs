use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("n(q) and d(q) are only defined for positive q")]
    ZeroHasNoNumDen,
    #[error("malformed rational {0:?} (expected \"p/q\" or \"p\")")]
    ParseRat(String),
    #[error("generators must be strictly positive")]
    ZeroGenerator,
    #[error("monoid has no atoms")]
    NoAtoms,
    #[error("integer-side value {0} does not fit in 64 bits")]
    Overflow(String),
    #[error("{what} exceeded the cap of {cap}")]
    CapExceeded { what: &'static str, cap: u64 },
    #[error("factorization has {got} entries but the monoid has {expected} atoms")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("stream index {index} is out of range (stream length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("truncation below {0} did not terminate within {1} stream indices")]
    NonTerminatingTruncation(String, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for the resource guards (factorization count, DP table size).
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::Overflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
