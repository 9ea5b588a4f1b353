//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of a JSONL log could not be decoded.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A log violates a structural invariant (duplicate or missing seq, bad author, ...).
    #[error("integrity error in channel '{channel}': {message}")]
    Integrity { channel: String, message: String },

    /// A target (channel, seq) pair does not resolve to a message.
    #[error("unknown target: channel '{channel}' has no message with seq {seq}")]
    UnknownTarget { channel: String, seq: u64 },

    /// A vertex index or name is not part of the graph.
    #[error("unknown vertex: {0}")]
    UnknownVertex(String),

    /// A serialized graph file is malformed.
    #[error("graph format error: {0}")]
    GraphFormat(String),

    /// An input vector or table has the wrong shape.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Model feature names do not match the dataset header.
    #[error("feature name mismatch: {0}")]
    FeatureNameMismatch(String),

    /// The classifier cannot be trained on this input.
    #[error("training error: {0}")]
    Training(String),

    /// The evaluation protocol preconditions are not met.
    #[error("protocol error: {0}")]
    Protocol(String),

    /// An out-of-range or inconsistent parameter value.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The synthetic corpus generator was given an infeasible configuration.
    #[error("generation error: {0}")]
    Generation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
