use thiserror::Error;

/// Errors produced by the numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state is not normalized: squared norm is {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("matrix is not Hermitian: max |M - M^dagger| entry is {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("matrix has {entries} entries, limit is {limit}")]
    TooLarge { entries: usize, limit: usize },

    #[error(
        "Jacobi sweeps did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("unknown state name `{0}` (expected ghz, w or product)")]
    UnknownName(String),

    #[error("parameters cannot be normalized: {0}")]
    NotNormalizable(String),

    #[error("squared A|BC negativity {z_sq} is not reachable (max {max})")]
    Unreachable { z_sq: f64, max: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dataset format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
