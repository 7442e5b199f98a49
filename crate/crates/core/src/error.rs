use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("pair count {pairs} outside the allowed range 0..={max}")]
    PairCountOutOfRange { pairs: u32, max: u32 },

    #[error("coupling matrix is not symmetric at ({row}, {col})")]
    NonSymmetricCoupling { row: usize, col: usize },

    #[error("invalid level {level}: {reason}")]
    InvalidLevel { level: usize, reason: String },

    #[error("basis dimension {dim} exceeds the configured cap of {cap} states")]
    BasisTooLarge { dim: u128, cap: usize },

    #[error("matrix assembly would store more than {cap} elements")]
    TooManyNonZeros { cap: usize },

    #[error("dense eigensolver refused dimension {dim} (limit {limit}) and no iterative fallback was allowed")]
    DenseTooLarge { dim: usize, limit: usize },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("shifted harmonic approximation not applicable: {0}")]
    InvalidRegime(String),

    #[error("empty subspace: {0}")]
    EmptySubspace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_)
                | Error::InvalidRegime(_)
                | Error::EmptySubspace(_)
                | Error::DenseTooLarge { .. }
                | Error::TooManyNonZeros { .. }
                | Error::BasisTooLarge { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
