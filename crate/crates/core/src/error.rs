use std::fmt;

use crate::graph::Role;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: {role} id {id} out of range (declared {count})")]
    Malformed {
        line: usize,
        role: Role,
        id: u64,
        count: usize,
    },

    #[error("{role} id {id} out of range (declared {count})")]
    VertexOutOfRange { role: Role, id: u64, count: usize },

    #[error("metadata: {0}")]
    Metadata(String),

    #[error("schema: {0}")]
    Schema(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("config: {0}")]
    Config(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("graph has {edges} edges, exhaustive search is limited to {limit}")]
    TooLarge { edges: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error classes, used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Parse,
    Config,
    Contract,
    Io,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse { .. }
            | Error::Malformed { .. }
            | Error::VertexOutOfRange { .. }
            | Error::Metadata(_)
            | Error::Schema(_) => ErrorCategory::Parse,
            Error::Infeasible(_) | Error::Config(_) | Error::TooLarge { .. } => {
                ErrorCategory::Config
            }
            Error::Contract(_) => ErrorCategory::Contract,
            Error::Io(_) => ErrorCategory::Io,
        }
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorCategory::Parse => "parse",
            ErrorCategory::Config => "config",
            ErrorCategory::Contract => "contract",
            ErrorCategory::Io => "io",
        })
    }
}
