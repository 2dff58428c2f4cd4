use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inputs outside the admissible parameter domain (θη ≥ 1, R ≥ 1, negative deformations, ...).
    #[error("{0}")]
    Domain(String),

    #[error("unsupported mode layout ({n_a}, {n_b}): only (2, 2) is supported here")]
    UnsupportedLayout { n_a: usize, n_b: usize },

    #[error("expected a {expected} structure matrix, got {found}")]
    Kind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("shape mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("Darboux block is numerically singular")]
    SingularMap,

    #[error("structure matrix is not invertible")]
    SingularStructure,

    #[error("eigenvalues failed to pair up: residual {residual:e} exceeds {limit:e}")]
    Pairing { residual: f64, limit: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("could not parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse grouping used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Domain,
    Numerics,
    Io,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Domain(_)
            | Error::UnsupportedLayout { .. }
            | Error::Kind { .. }
            | Error::Shape { .. }
            | Error::Parse { .. } => ErrorCategory::Domain,
            Error::NotSymmetric { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::SingularMap
            | Error::SingularStructure
            | Error::Pairing { .. }
            | Error::Numerical(_) => ErrorCategory::Numerics,
            Error::Io { .. } => ErrorCategory::Io,
        }
    }
}
