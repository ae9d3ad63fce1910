use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("direction is not unit norm (|n| = {norm})")]
    NormViolation { norm: f64 },

    #[error("shape mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    ShapeViolation {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Fisher information must be positive, got {0}")]
    NonPositiveInformation(f64),

    #[error("initial state is an eigenstate of Jz (sin(theta0) = 0)")]
    DegenerateInitialState,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
