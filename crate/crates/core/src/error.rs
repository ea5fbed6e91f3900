//! Error type shared by every module in the crate.

use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad data handed in by the caller (empty corpus, label out of range, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A configuration that can never produce a runnable model or run.
    #[error("invalid config: {0}")]
    Config(String),

    /// Malformed file contents; `line` is 1-based where known.
    #[error("parse error in {path} (line {line}): {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Non-finite loss or gradient; the inner training run is aborted.
    #[error("training diverged: {0}")]
    Diverged(String),

    /// An API precondition was broken by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Checkpoint directory does not match its manifest.
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),

    /// Cosine similarity requested against a zero vector.
    #[error("similarity undefined: {0}")]
    UndefinedSimilarity(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
