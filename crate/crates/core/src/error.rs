use thiserror::Error;

/// Errors raised by the chain, spectral and metric constructions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A q-number denominator vanished (or nearly so) at the requested deformation.
    #[error("singular deformation parameter gamma = {gamma}: {what}")]
    SingularGamma { gamma: f64, what: String },

    #[error("index error: {0}")]
    Index(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Convergence(String),

    #[error("operator is not diagonalizable at working precision (residual {residual:.3e})")]
    NotDiagonalizable { residual: f64 },

    #[error("could not pair roots into quadratic factors: {0}")]
    Fit(String),

    #[error("operator is not quasi-Hermitian: max |Im lambda| = {max_abs_imag:.3e}")]
    NotQuasiHermitian { max_abs_imag: f64 },

    #[error("eigenbasis is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("block {index} is not Hermitian positive definite")]
    BadBlock { index: usize },

    #[error("spectrum is degenerate: {0}")]
    DegenerateSpectrum(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(err: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(err.to_string())
    }
}
