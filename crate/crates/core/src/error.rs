use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range 0..={n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("solution length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("malformed solution string: {0}")]
    Solution(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("exact oracle refuses n={n} (bound {bound})")]
    OracleBound { n: usize, bound: usize },
    #[error("covering search exceeded its node budget of {0}")]
    CoverBudgetExceeded(u64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("planted construction failed: {0}")]
    Plant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
