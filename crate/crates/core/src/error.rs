use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("quota {quota} exceeds the number of colors {colors}")]
    QuotaExceedsColors { quota: usize, colors: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("instance must be normalized (start vertex carries colors)")]
    NotNormalized,
    #[error("{colors} working colors exceed the bitmask cap of {cap}")]
    TooManyColors { colors: usize, cap: usize },
    #[error("quota {quota} cannot be met: only {available} colors are collectible")]
    InfeasibleQuota { quota: usize, available: usize },
    #[error("multigraph is not Eulerian: {0}")]
    NotEulerian(String),
    #[error("start vertex {0} is not on the multigraph support")]
    StartOffSupport(usize),
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error(
        "degenerate instance: quota is positive but no vertex other than the start has a color"
    )]
    DegenerateInstance,
    #[error("solver backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("model rejected: {0}")]
    ModelRejected(String),
    #[error("time limit reached")]
    Timeout,
    #[error("model is infeasible")]
    Infeasible,
    #[error("selected edges contain a circulation that avoids the start vertex")]
    CirculationDetected,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid id {id} (must be below {bound})")]
    InvalidId { id: usize, bound: usize },
    #[error("negative edge weight {0}")]
    NegativeWeight(f64),
    #[error("k = {k} exceeds the {available} candidate colors")]
    KTooLarge { k: usize, available: usize },
    #[error("greedy reduction needs a start color set or the smallest-id fallback")]
    EmptyInitNoFallback,
    #[error("colors have no positions; a metric embedding is required")]
    NoEmbedding,
    #[error("buckets do not partition the working colors: {0}")]
    InvalidBuckets(String),
    #[error("oracle limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
