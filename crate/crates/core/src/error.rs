use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("variable `{name}` at offset {offset} exceeds dimension {dim}")]
    VariableOutOfRange {
        offset: usize,
        name: String,
        dim: usize,
    },

    #[error("domain error in `{expr}`: {message}")]
    Domain { expr: String, message: String },

    #[error("degenerate metric at {point}: {message}")]
    Degenerate { point: String, message: String },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("jet order {requested} exceeds supported maximum {max}")]
    OrderTooHigh { requested: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown case id {0} (valid ids are 1..=26)")]
    UnknownCase(usize),

    #[error("case {id} requires the free choice `{name}`")]
    MissingChoice { id: usize, name: String },
}

impl Error {
    pub(crate) fn domain(expr: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Domain {
            expr: expr.into(),
            message: message.into(),
        }
    }
}
