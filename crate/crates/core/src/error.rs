use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree {degree} exceeds the supported ceiling {ceiling}")]
    DegreeTooLarge { degree: usize, ceiling: usize },

    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("second moment diverges: {0}")]
    DivergentMoment(String),

    #[error("density is not reflection symmetric: imaginary residue {0:e}")]
    SymmetryViolation(f64),

    #[error("trace residual {residual:e} exceeds the declared tolerance {tolerance:e}")]
    Truncation { residual: f64, tolerance: f64 },

    #[error("normalisation residual {residual:e} exceeds tolerance {tolerance:e}")]
    Normalization { residual: f64, tolerance: f64 },

    #[error("Fock basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge within {0} sweeps")]
    EigenNotConverged(usize),

    #[error("eigenvalue {0} lies outside [-2, 2]")]
    SpectrumOutOfRange(f64),

    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    #[error("kernel grid rejected: {0}")]
    GridValidation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
