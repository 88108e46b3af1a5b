use thiserror::Error;

/// Errors produced by the eigenvalue-programming toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    EigSolverNoConvergence { sweeps: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("empty constraint: {0}")]
    EmptyConstraint(String),

    #[error("non-finite value encountered: {0}")]
    NonFiniteValue(String),

    #[error("restart budget exceeded after {restarts} restarts")]
    RestartBudgetExceeded { restarts: usize },

    #[error("matrix {index} is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { index: usize, min_eigenvalue: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
