//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation is undefined for the empty word")]
    EmptyWord,

    #[error("word letters must be positive")]
    ZeroLetter,

    #[error("letter overflow while incrementing the last letter")]
    LetterOverflow,

    #[error("n must be at least {min}, got {n}")]
    NTooSmall { n: u64, min: u64 },

    #[error("level {level} exceeds the depth cap {cap}")]
    DepthCapExceeded { level: u32, cap: u32 },

    #[error("{count} optimal sets exceed the enumeration cap {cap}")]
    EnumerationCapExceeded { count: u128, cap: u64 },

    #[error("subset has {got} indices but n - 2^l = {expected}")]
    SubsetSizeMismatch { got: usize, expected: usize },

    #[error("subset index {index} out of range for a level set of {len} points")]
    SubsetIndexOutOfRange { index: usize, len: usize },

    #[error("subset index {index} appears more than once")]
    DuplicateSubsetIndex { index: usize },

    #[error("level set of size {len} does not match 2^{level}")]
    LevelSetSizeMismatch { len: usize, level: u32 },

    #[error("polynomial degree {degree} unsupported: closed-form moments stop at degree 2")]
    DegreeTooHigh { degree: usize },

    #[error("self-similarity check over {count} words exceeds the word budget {cap}")]
    WordBudgetExceeded { count: u128, cap: u64 },

    #[error("epsilon must satisfy 0 < epsilon <= 1, got {epsilon}")]
    InvalidEpsilon { epsilon: String },

    #[error("discretization would exceed the atom cap {cap}; coarsen epsilon or raise the cap")]
    AtomCapExceeded { cap: usize },

    #[error("k-means with n = {n} needs at least n atoms, measure has {atoms}")]
    NExceedsAtoms { n: usize, atoms: usize },

    #[error("max_iter must be at least 1")]
    ZeroIterations,

    #[error("point {index} has position {position}, which is not the centroid of {label}")]
    InconsistentLabel {
        index: usize,
        position: String,
        label: String,
    },

    #[error("quantizer points must have strictly increasing positions (duplicate {position})")]
    DuplicatePosition { position: String },

    #[error("point position {position} lies outside [0, 1]")]
    PositionOutOfRange { position: String },

    #[error("cannot parse {input:?} as a rational number")]
    ParseRational { input: String },
}
