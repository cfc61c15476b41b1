use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("transposition index {index} out of range for {letters} letters")]
    IndexOutOfRange { index: usize, letters: usize },

    #[error("letter {letter} is outside 1..={max}")]
    LetterOutOfRange { letter: u64, max: u64 },

    #[error("invalid permutation of 1..={0}")]
    InvalidPermutation(usize),

    #[error("pattern parse error: {0}")]
    PatternSyntax(String),

    #[error("parse error: {0}")]
    Syntax(String),

    #[error("enumeration budget exceeded: {needed} words > {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    #[error("{0}")]
    Precondition(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
