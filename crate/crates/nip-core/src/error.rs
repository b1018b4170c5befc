//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operator entries must be finite")]
    NonFiniteEntries,

    #[error("operator is not Hermitian: defect {defect:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("operator is not positive definite: smallest eigenvalue {margin:.3e}")]
    NotPositiveDefinite { margin: f64 },

    #[error("time grid must be uniform, strictly increasing, and hold at least two samples")]
    InvalidGrid,

    #[error("time grid too short: {got} samples, need at least {need}")]
    GridTooShort { got: usize, need: usize },

    #[error("operator is ill-conditioned: estimated condition number {0:.3e}")]
    IllConditioned(f64),

    #[error("degenerate spectrum: smallest eigenvalue gap {gap:.3e} at or below {tolerance:.3e}")]
    DegenerateSpectrum { gap: f64, tolerance: f64 },

    #[error("operator is defective within tolerance: eigenvector pairing overlap {overlap:.3e}")]
    NonDiagonalizable { overlap: f64 },

    #[error("eigenpair index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("kappa weights must be strictly positive")]
    NonPositiveKappa,

    #[error("metric is not compatible with the eigensystem: off-diagonal weight {0:.3e}")]
    IncompatibleMetric(f64),

    #[error("complex spectrum at t = {t}: max |Im E| = {max_imag:.3e}")]
    ComplexSpectrumAt { t: f64, max_imag: f64 },

    #[error("degenerate spectrum at t = {t}: gap {gap:.3e}")]
    DegenerateSpectrumAt { t: f64, gap: f64 },

    #[error("metric singular or indefinite at t = {t}")]
    MetricSingularAt { t: f64 },

    #[error("integration blow-up at t = {t}: norm {norm:.3e} exceeds cap {cap:.3e}")]
    BlowUp { t: f64, norm: f64, cap: f64 },

    #[error("ansatz is not Hermitian: defect {defect:.3e} exceeds {tolerance:.3e}")]
    NotHermitianAnsatz { defect: f64, tolerance: f64 },

    #[error("initial basis is not biorthonormal: defect {0:.3e}")]
    InitialBasisInvalid(f64),

    #[error("biorthonormality drift {drift:.3e} exceeds threshold {threshold:.3e}")]
    ExcessiveDrift { drift: f64, threshold: f64 },

    #[error("reference basis is not orthonormal: defect {0:.3e}")]
    ReferenceNotOrthonormal(f64),

    #[error("vanishing bra-ket overlap: |<<psi|psi>| = {0:.3e}")]
    VanishingOverlap(f64),

    #[error("condition cap exceeded after {attempts} draws (last estimate {condition:.3e})")]
    ConditionCapExceeded { attempts: usize, condition: f64 },

    #[error("dense eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Eigensolver(e.to_string())
    }
}

impl Error {
    /// Process exit status for scripted use: 3 for unusable input, 4 for
    /// runtime blow-up or loss of invertibility, 2 for every other numerical
    /// failure.
    pub fn exit_status(&self) -> i32 {
        match self {
            Error::InvalidScenario(_) | Error::Io(_) => 3,
            Error::BlowUp { .. } | Error::IllConditioned(_) | Error::MetricSingularAt { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
