use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside their documented domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// The Fock cutoff is too small for the requested computation.
    #[error("truncation: {message} (try cutoff >= {suggested_cutoff})")]
    Truncation {
        message: String,
        suggested_cutoff: usize,
    },

    /// The phase-space grid does not cover the support of a distribution.
    #[error("truncation: {message} (try grid extent >= {suggested_extent:.1})")]
    GridTruncation {
        message: String,
        suggested_extent: f64,
    },

    /// A field handed to a Fourier-type transform has not decayed at the grid boundary.
    #[error("aliasing: boundary magnitude {boundary:.3e} exceeds {threshold:.3e}")]
    Aliasing { boundary: f64, threshold: f64 },

    /// Two fields live on incompatible grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn truncation(msg: impl Into<String>, suggested_cutoff: usize) -> Self {
        Error::Truncation {
            message: msg.into(),
            suggested_cutoff,
        }
    }

    /// True for failures that indicate numerical non-convergence rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. } | Error::GridTruncation { .. } | Error::Aliasing { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
