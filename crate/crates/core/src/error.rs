use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(String, String),
    #[error("division by a series with constant term {0}, expected 1")]
    NonUnit(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier {name:?} at position {pos}")]
    UnknownIdent { pos: usize, name: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
