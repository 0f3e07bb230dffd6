use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failed to allocate {what} ({bytes} bytes)")]
    Alloc { what: &'static str, bytes: usize },

    #[error("path count overflowed 64 bits while expanding from source {source_vertex}")]
    SigmaOverflow { source_vertex: u32 },

    #[error("reference oracle refuses graphs with {vertices} vertices (limit {limit})")]
    OracleGuard { vertices: usize, limit: usize },

    #[error("malformed graph file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
