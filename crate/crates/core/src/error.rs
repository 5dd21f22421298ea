use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArcticError {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("degenerate envelope: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, ArcticError>;
