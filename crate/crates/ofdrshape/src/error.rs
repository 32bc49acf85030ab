//! Error type shared across the crate.
//!
//! Variants map onto the failure classes the pipeline distinguishes:
//! not enough samples to fit, degenerate fit systems, values outside a
//! physical or numerical domain, mismatched gauge grids, malformed files,
//! and plain I/O failures. The CLI maps these onto exit codes (domain and
//! format problems exit 2, I/O problems exit 3).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Too few samples for the requested operation.
    #[error("insufficient data: got {got} sample(s), need at least {need}")]
    InsufficientData { got: usize, need: usize },

    /// The fit system is rank-deficient (for a power law: all strain
    /// magnitudes identical, so the exponent is unobservable).
    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    /// A value lies outside the physical or numerical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two profiles or frames do not share a gauge grid.
    #[error("gauge grid mismatch: {0}")]
    GridMismatch(String),

    /// A file or string has the wrong shape for its format.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
