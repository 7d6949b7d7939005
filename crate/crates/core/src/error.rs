use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("arity {arity} exceeds truncation bound {bound}")]
    TruncationExceeded { arity: usize, bound: usize },
    #[error("right factor has arity-0 elements; composite product needs an explicit k bound")]
    UnboundedComposite,
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("composition undefined: {0}")]
    CompositionUndefined(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a chain complex: d^{next} d^{degree} is nonzero", next = .degree + 1)]
    NotAComplex { degree: usize },
    #[error("functoriality violated: {0}")]
    Functoriality(String),
    #[error("size guard: {0}")]
    TooLarge(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("schema version {found} does not match expected {expected}")]
    Schema { found: u32, expected: u32 },
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
