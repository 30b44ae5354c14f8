use std::path::PathBuf;

use thiserror::Error;

use crate::graph::Node;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("node {node} out of range (n = {n})")]
    InvalidNode { node: Node, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(Node),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Node, Node),

    #[error("duplicate query ({0}, {1})")]
    DuplicateQuery(Node, Node),
    #[error("budget exhausted")]
    BudgetExhausted,

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("q = {q} exceeds {limit}")]
    QueryCountOutOfRange { q: usize, limit: usize },
    #[error("undefined normalization: min and max efficiency coincide")]
    UndefinedNormalization,
    #[error("normalized efficiency {0} outside [0, 1]")]
    EfficiencyOutOfRange(f64),
    #[error("undefined relative efficiency: random baseline has zero normalized efficiency")]
    UndefinedRelative,

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
