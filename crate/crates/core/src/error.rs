use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} below floor {floor:e}")]
    NotPsd { min_eigenvalue: f64, floor: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid vector set: {0}")]
    InvalidVectorSet(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("kernel {0} has no finite-dimensional feature map")]
    UnsupportedKernel(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("at least 2 vectors are required, got {0}")]
    TooFewVectors(usize),

    #[error("vector {index} has norm {norm}, expected unit norm")]
    NotUnitNorm { index: usize, norm: f64 },

    #[error("all vectors are zero")]
    AllZeroVectors,

    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),

    #[error("invalid rank scan: {0}")]
    InvalidScan(String),

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
