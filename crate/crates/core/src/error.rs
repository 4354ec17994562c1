use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector length must be at least 1")]
    EmptyVector,

    #[error("linear system has no solution")]
    NoSolution,

    #[error("matrix is singular")]
    Singular,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no reconstruction group can reach rank {m}: {reason}")]
    Infeasible { m: usize, reason: String },

    #[error("malformed cluster file at byte {offset}: {reason}")]
    MalformedFile { offset: usize, reason: String },

    #[error("cluster integrity violation: {0}")]
    Integrity(String),

    #[error("operation requires a reconstruction group with at least two members (group {0} is a singleton)")]
    SingletonGroup(usize),

    #[error("no distinct non-zero key selector left for content {index} in group {group}")]
    KeySelection { group: usize, index: usize },

    #[error("request expands to the zero combination")]
    DegenerateRequest,

    #[error("need {needed} reconstruction groups, cluster has {available}")]
    InsufficientGroups { needed: usize, available: usize },

    #[error("value outside the domain: {0}")]
    Domain(String),

    #[error("search too large: {0}")]
    SizeGuard(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("config error at line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
