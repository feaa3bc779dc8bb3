//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by any pipeline stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("point cloud has {got} points, need at least {need}")]
    TooFewPoints { need: usize, got: usize },
    #[error("non-finite coordinate in point cloud")]
    NonFinitePoint,
    #[error("divergent IFS")]
    DivergentIfs,
    #[error("cannot satisfy variance threshold after {attempts} attempts")]
    VarianceThreshold { attempts: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    /// Text-format parse failure, positioned by line (1-based; 0 = whole file).
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    /// Binary-format failure, positioned by byte offset.
    #[error("{}: {msg} at byte {offset}", path.display())]
    Format {
        path: PathBuf,
        offset: u64,
        msg: String,
    },
    #[error("class {class:?} has {count} samples, need at least {need}")]
    ClassTooSmall {
        class: String,
        count: usize,
        need: usize,
    },
    #[error("unknown class {class:?}; known classes: {}", known.join(", "))]
    UnknownClass { class: String, known: Vec<String> },
    #[error("solver did not converge: {0}")]
    Solver(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("non-finite value during {0}")]
    NonFinite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
