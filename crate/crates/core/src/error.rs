use thiserror::Error;

/// Errors produced by sampling construction, polynomial evaluation and sweeps.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate nodes: {0}")]
    DegenerateNodes(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("node collision: evaluation point {0} coincides with a node")]
    NodeCollision(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
