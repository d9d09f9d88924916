use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, WalkError>;

#[derive(Debug, Error)]
pub enum WalkError {
    /// Invalid user-supplied parameters: coins, spinors, initial states, config documents.
    #[error("config error: {0}")]
    Config(String),

    /// A well-formed query outside the domain where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The dense reference engine would exceed its memory cap or window.
    #[error("resource error: {0}")]
    Resource(String),

    /// A numerical gate (norm drift, probability bounds) was violated.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl WalkError {
    /// Process exit code for this error class: 2 for configuration, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            WalkError::Config(_) => 2,
            _ => 1,
        }
    }
}
