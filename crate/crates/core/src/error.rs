use thiserror::Error;

/// Numerical errors raised by the operator, bracket and dynamics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator has non-finite entries")]
    NonFiniteEntries,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator dimension must be at least 1")]
    EmptyOperator,
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("norm {norm:.3e} exceeds exponential cap {cap:.3e}")]
    NormOverflow { norm: f64, cap: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("condition number {cond:.3e} exceeds cap {cap:.3e}")]
    IllConditioned { cond: f64, cap: f64 },
    #[error("Hermitian part of the Hamiltonian is singular")]
    SingularHermitianPart,
    #[error("state became non-finite at step {step}")]
    NonFiniteState { step: usize },
    #[error("trace {trace:.3e} is too small to normalize by")]
    VanishingTrace { trace: f64 },
    #[error("generator is not Hermitian (defect {defect:.3e})")]
    NonHermitianGenerator { defect: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
