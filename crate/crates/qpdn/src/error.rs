//! Error type shared by every layer of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate state: amplitude vector has zero norm")]
    DegenerateState,

    #[error("negative amplitude {value} at component {index}")]
    NegativeAmplitude { index: usize, value: f64 },

    #[error("state not normalized: squared norm {norm_sq} deviates from 1 beyond tolerance")]
    NotNormalized { norm_sq: f64 },

    #[error("mixture weights invalid: {reason}")]
    InvalidWeights { reason: String },

    #[error("empty mixture")]
    EmptyMixture,

    #[error("empty sentence")]
    EmptySentence,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("token id {id} out of range for vocabulary of size {vocab_size}")]
    TokenOutOfRange { id: usize, vocab_size: usize },

    #[error("label index {index} out of range for {count} labels")]
    LabelOutOfRange { index: usize, count: usize },

    #[error("unknown label {label:?} not present in the training label set")]
    UnknownLabel { label: String },

    #[error("cache does not match parameters: {reason}")]
    CacheMismatch { reason: String },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("divergence detected in {context}")]
    Divergence { context: String },

    #[error("cannot build {requested} orthonormal states in dimension {dim}")]
    OrthonormalCount { requested: usize, dim: usize },

    #[error("empty corpus: {path}")]
    EmptyCorpus { path: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Read a whole file, attaching the path to any failure.
pub fn read_named(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.display().to_string(),
        source,
    })
}

impl Error {
    /// Process exit code the command line driver maps this error to.
    /// Divergence is distinguished so schedulers can retry with a
    /// different configuration; everything else is a usage or data problem.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Divergence { .. } => 3,
            _ => 2,
        }
    }
}
