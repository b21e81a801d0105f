use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GqError {
    #[error("universe must have at least one element")]
    EmptyUniverse,

    #[error("coordinate {value} out of range for universe of size {size}")]
    OutOfRange { value: usize, size: usize },

    #[error("arity mismatch: expected {expected}, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("universe mismatch: expected size {expected}, got {actual}")]
    UniverseMismatch { expected: usize, actual: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("not {property}: {witness}")]
    Classification { property: String, witness: String },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("resource limit exceeded: {what} (required {required}, limit {limit}, partial {partial})")]
    Resource {
        what: String,
        required: u128,
        limit: u128,
        partial: usize,
    },

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GqError>;

impl GqError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        GqError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn classification(property: &str, witness: impl Into<String>) -> Self {
        GqError::Classification {
            property: property.to_string(),
            witness: witness.into(),
        }
    }
}
