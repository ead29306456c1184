use thiserror::Error;

/// Errors raised by the word, process and series engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the alphabet needs at least one life per particle (k >= 1)")]
    EmptyAlphabet,

    #[error("digit {digit} at position {position} exceeds k = {k}")]
    DigitOutOfRange { digit: u8, position: usize, k: u8 },

    #[error("diamond at position {position} is not allowed in a plain word")]
    UnexpectedDiamond { position: usize },

    #[error("invalid character {ch:?} at position {position}")]
    InvalidCharacter { ch: char, position: usize },

    #[error("the empty word is not allowed here")]
    EmptyWord,

    #[error("gap {gap} is out of range for a word of length {len}")]
    GapOutOfRange { gap: usize, len: usize },

    #[error("step {step} of the trajectory picks gap {gap}, but only {available} gaps exist")]
    MalformedTrajectory {
        step: usize,
        gap: usize,
        available: usize,
    },

    #[error("invalid run-length encoding: {0}")]
    InvalidRunLength(String),

    #[error("value at index {index} is duplicated or not finite")]
    DuplicateValue { index: usize },

    #[error("{what} is limited to n <= {limit}, got n = {n}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("{0} is not k-dominant")]
    NotDominant(String),

    #[error("degenerate distribution: {0}")]
    Degenerate(&'static str),

    #[error("memo store: {0}")]
    Memo(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
