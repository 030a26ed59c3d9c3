use std::path::PathBuf;

use thiserror::Error;

/// Errors shared across the crate.
///
/// Soft per-query outcomes (an unreachable endpoint, a disconnected
/// pair) are not errors; they are reported inside the result structs of
/// the operations that produce them.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid kernel, grid, or experiment configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A rectangle or point falls outside the sampled extent, or two
    /// samples that must share a grid do not.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Numerical quadrature failed to converge to the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// Numerical differentiation of a kernel autocorrelation failed,
    /// typically because the profile is not smooth enough at the origin.
    #[error("numerical differentiation failed: {0}")]
    Differentiation(String),

    /// Exact diameter evaluation refused a component larger than the cap.
    #[error("component has {cells} cells, above the exact-diameter cap {cap}")]
    CapExceeded { cells: usize, cap: usize },

    /// Boundary curves of a component do not form one outer contour
    /// plus strictly interior, pairwise exterior holes.
    #[error("contour classification failed for component {label}: {reason}")]
    ClassificationFailure { label: u32, reason: String },

    /// An invariant the operation promises to verify did not hold.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// File I/O with path context.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file had the wrong magic, truncated payload, or malformed rows.
    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
