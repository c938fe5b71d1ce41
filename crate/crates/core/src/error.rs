//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("node label file references unknown node `{0}`")]
    UnknownNode(String),

    #[error("node `{0}` has no entry in the node label file")]
    MissingNodeLabel(String),

    #[error("node label file lists node `{0}` more than once")]
    DuplicateNodeLabel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model used before fitting")]
    NotFitted,

    #[error("PCA transform requested before finalize")]
    NotFinalized,

    #[error("PCA already finalized; no further partial fits accepted")]
    AlreadyFinalized,

    #[error("first k-means batch has {rows} rows but {required} clusters were requested")]
    BatchTooSmall { rows: usize, required: usize },

    #[error("{count} samples seen but at least {required} required")]
    TooFewSamples { count: u64, required: usize },

    #[error("node {node} carries label {label}, outside the trained range [0, {limit})")]
    NodeLabelOutOfRange {
        node: usize,
        label: u32,
        limit: usize,
    },

    #[error("edge ({from}, {to}) carries label {label}, outside the trained range [0, {limit})")]
    EdgeLabelOutOfRange {
        from: usize,
        to: usize,
        label: u32,
        limit: usize,
    },

    #[error("model/graph variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("model has no graph-representation head (trained with graph_clusters = 0)")]
    MissingGraphModel,

    #[error("{what} did not converge; residual {residual:e}")]
    NonConvergence { what: &'static str, residual: f64 },

    #[error("maximal clique enumeration exceeded the budget of {budget} cliques")]
    CliqueBudgetExceeded { budget: usize },

    #[error("target variance is degenerate; R\u{b2} is undefined")]
    DegenerateTarget,

    #[error("{0} requires an undirected graph")]
    UndirectedOnly(&'static str),

    #[error("not a model file (bad magic)")]
    BadMagic,

    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),

    #[error("model payload checksum mismatch")]
    ChecksumMismatch,

    #[error("model file truncated or directory out of bounds")]
    Truncated,

    #[error("model manifest invalid: {0}")]
    Manifest(String),

    #[error("model array shape mismatch: {0}")]
    ShapeMismatch(String),
}
