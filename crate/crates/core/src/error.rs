use thiserror::Error;

/// Errors produced while loading topologies or running an analysis.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}`-`{1}`")]
    DuplicateEdge(String, String),
    #[error("`{0}` is a reserved node identifier")]
    ReservedName(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown monitor `{0}`")]
    UnknownMonitor(String),
    #[error("zero monitors")]
    NoMonitors,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("`{0}` is not a monitor")]
    NotAMonitor(String),
    #[error("`{0}` is not a non-monitor")]
    NotANonMonitor(String),
    #[error("source and sink must differ")]
    SameEndpoints,
    #[error("node set is empty")]
    EmptySet,
    #[error("k = {k} outside 1..={sigma}")]
    KOutOfRange { k: usize, sigma: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(
        "enumeration cap exceeded ({nodes} nodes, {edges} links; limit {max_nodes} nodes, {max_edges} links); use the theorem-based analysis instead"
    )]
    EnumerationCap {
        nodes: usize,
        edges: usize,
        max_nodes: usize,
        max_edges: usize,
    },
    #[error("oracle cap exceeded ({sigma} non-monitors; limit {max_sigma})")]
    OracleCap { sigma: usize, max_sigma: usize },
    #[error("this mechanism needs a measurement path set")]
    MissingPaths,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("no connected graph after {0} attempts")]
    RetryLimit(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
