use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("mixed scalar kinds: exact and float objects cannot be combined")]
    MixedKinds,
    #[error("filter support would exceed the cap of {cap} nonzero entries (set COSETSUM_MAX_SUPPORT to raise it)")]
    SupportCapExceeded { cap: usize },
    #[error("not a refinement mask: coefficient sum of the filter is {sum}, expected 2^dim = {expected}")]
    NotRefinement { sum: String, expected: String },
    #[error("mask is not interpolatory")]
    NotInterpolatory,
    #[error("masks are not biorthogonal")]
    NotBiorthogonal,
    #[error("invalid coset representatives: {0}")]
    InvalidCosetReps(String),
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("operation requires a univariate mask, got dimension {0}")]
    NotUnivariate(usize),
    #[error("filter is not symmetric about the origin")]
    NotSymmetric,
    #[error("grid axis {axis} has size {size}, not divisible by 2^{levels}")]
    NotDivisible {
        axis: usize,
        size: usize,
        levels: u32,
    },
    #[error("grid shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("operation counter is empty: no samples have been processed")]
    EmptyCounter,
    #[error("search cap of {0} derivative orders reached")]
    CapReached(u32),
    #[error("{0}")]
    Invalid(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
