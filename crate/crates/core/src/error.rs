use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown taxonomy node `{0}`")]
    UnknownNode(String),

    #[error("duplicate object id `{0}`")]
    DuplicateObject(String),

    #[error("duplicate taxonomy node `{0}`")]
    DuplicateNode(String),

    #[error("object nesting contains a cycle through `{0}`")]
    NestingCycle(String),

    #[error("taxonomy contains a cycle through `{0}`")]
    TaxonomyCycle(String),

    #[error("invalid fact: {0}")]
    InvalidFact(String),

    #[error("rule file line {line}: {message}")]
    RuleSyntax { line: usize, message: String },

    #[error("invalid rule `{rule}`: {message}")]
    InvalidRule { rule: String, message: String },

    #[error("statement subject `{found}` does not belong to resource `{expected}`")]
    ResourceMismatch { expected: String, found: String },

    #[error("incomplete reification for `{id}`: {message}")]
    IncompleteReification { id: String, message: String },

    #[error("invalid term: {0}")]
    InvalidTerm(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown prefix `{0}`")]
    UnknownPrefix(String),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed experiment fixture: {0}")]
    Fixture(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
