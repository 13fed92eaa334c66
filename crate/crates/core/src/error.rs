use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) has an endpoint outside [0, {n})")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("feature row {row} has {got} columns, expected {expected}")]
    RaggedFeatures { row: usize, got: usize, expected: usize },
    #[error("feature matrix has {got} rows but the graph has {n} nodes")]
    FeatureRows { got: usize, n: usize },
    #[error("graph needs at least one feature column")]
    NoFeatureColumns,
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("permutation is not a bijection on [0, {0})")]
    NotAPermutation(usize),
    #[error("channel {channel} out of range for {m} feature columns")]
    ChannelOutOfRange { channel: usize, m: usize },

    #[error("invalid pattern order: {0}")]
    InvalidOrder(String),
    #[error("pattern `{0}` is disconnected")]
    DisconnectedPattern(String),
    #[error("pattern `{name}` has root {root} outside [0, {order})")]
    BadRoot { name: String, root: usize, order: usize },
    #[error("pattern `{0}` is rooted-isomorphic to `{1}`")]
    DuplicatePattern(String, String),
    #[error("pattern family is empty")]
    EmptyFamily,
    #[error("pattern `{0}` is not a tree")]
    NotATree(String),
    #[error("cycle length {0} is below 2")]
    CycleTooShort(usize),
    #[error("pattern `{name}` has {order} vertices; brute force is limited to {limit} unless forced")]
    SizeGuard { name: String, order: usize, limit: usize },

    #[error("embedding has {got} rows, expected {expected}")]
    RowMismatch { got: usize, expected: usize },
    #[error("duplicate column label `{0}`")]
    DuplicateLabel(String),
    #[error("cannot interpret column label `{0}`")]
    BadLabel(String),

    #[error("invalid SBM spec: {0}")]
    InvalidSbm(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("class {class} has {count} members, fewer than {folds} folds")]
    ClassTooSmall { class: usize, count: usize, folds: usize },
    #[error("forest has not been trained")]
    Untrained,

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }
}
