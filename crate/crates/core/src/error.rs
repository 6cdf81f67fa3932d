use thiserror::Error;

/// Errors produced by shape construction, enumeration, and verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity must be at least 2, got {0}")]
    InvalidArity(u32),

    #[error("expected {expected} subtrees, got {got}")]
    WrongSubtreeCount { expected: u32, got: usize },

    #[error("subtree arity {got} does not match expected arity {expected}")]
    ArityMismatch { expected: u32, got: u32 },

    #[error("internal node has {got} children, expected {expected}")]
    WrongChildCount { expected: u32, got: usize },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("leaf count {n} is not congruent to 1 modulo {modulus}")]
    InvalidLeafCount { n: u64, modulus: u32 },

    #[error("n must be at least {min}, got {n}")]
    NTooSmall { n: u64, min: u64 },

    #[error("weight vector must be non-empty")]
    EmptyWeights,

    #[error("weights must be positive integers")]
    NonPositiveWeight,

    #[error("weight sum exceeds the representable range")]
    WeightOverflow,

    #[error("sequence of length {len} is shorter than r = {r}")]
    SequenceTooShort { len: usize, r: u32 },

    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("vector entries must be strictly positive")]
    NonPositiveEntry,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exploration state cap of {cap} exceeded")]
    StateCapExceeded { cap: usize },

    #[error("shape count {count} exceeds configured cap {cap}")]
    ShapeCapExceeded { count: u64, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
