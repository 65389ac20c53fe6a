use thiserror::Error;

/// Errors raised by the walk, stencil and decoupling machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QwError {
    #[error("Pauli index {0} out of range (expected 0..=3)")]
    PauliIndex(usize),

    #[error("matrix is not anti-Hermitian (deviation {0:e})")]
    NotAntiHermitian(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("eigenvalue iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("axis {axis} out of range for a {n}-dimensional lattice")]
    AxisOutOfRange { axis: usize, n: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("lattice spacing must be positive, got {0}")]
    NonPositiveEps(f64),

    #[error("mass must be non-negative, got {0}")]
    NegativeMass(f64),

    #[error("grid size {0} is not a positive even number")]
    OddGrid(usize),

    #[error("momentum {given} on axis {axis} is not commensurate with the grid; nearest allowed value is {suggestion}")]
    NonCommensurate {
        axis: usize,
        given: f64,
        suggestion: f64,
    },

    #[error("unsupported component dimension {0}")]
    UnsupportedDim(usize),

    #[error("expected {expected} history slices, got {got}")]
    HistoryLength { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("all errors must be positive for a log-log fit; got {0:e} (exact to round-off)")]
    ExactToRoundoff(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QwError>;
