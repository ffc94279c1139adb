use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("no equality decision for {0}")]
    NonDecidableEquality(String),
    #[error("naturality violation: {0}")]
    NaturalityViolation(String),
    #[error("search inconclusive: {0}")]
    SearchInconclusive(String),
    #[error("internal category law violated: {0}")]
    InternalLawViolation(String),
    #[error("not enumerable: {0}")]
    NotEnumerable(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("not subterminal: {0}")]
    NotSubterminal(String),
    #[error("unsupported theory: {0}")]
    UnsupportedTheory(String),
    #[error("infinite carrier: {0}")]
    InfiniteCarrier(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}
