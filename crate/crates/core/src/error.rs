use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin {0:?}: expected a positive multiple of 1/2")]
    InvalidSpin(String),

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionGuard { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("spin mismatch: {0} vs {1}")]
    SpinMismatch(String, String),

    #[error("state is not normalized (norm^2 = {0})")]
    Unnormalized(f64),

    #[error("weight {index} is not strictly positive ({value})")]
    InvalidWeight { index: usize, value: f64 },

    #[error("POVM has no elements")]
    EmptyPovm,

    #[error("copy number must be at least 1")]
    InvalidCopies,

    #[error("unsupported copy number {0} (bounds are known for N = 1, 2, 3)")]
    UnsupportedCopies(u32),

    #[error("d-tensor entry ({a},{b},{c}) has imaginary part {imag:e}")]
    BrokenBasis { a: usize, b: usize, c: usize, imag: f64 },

    #[error("POVM fails completeness: residual {0:e}")]
    CompletenessFailed(f64),

    #[error("outcome probabilities sum to {0}")]
    ProbabilitySum(f64),

    #[error("value does not fit in the result type")]
    Overflow,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Stable machine-readable code for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidSpin(_) => "invalid_spin",
            Error::DimensionGuard { .. } => "dimension_guard",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SpinMismatch(..) => "spin_mismatch",
            Error::Unnormalized(_) => "unnormalized_state",
            Error::InvalidWeight { .. } => "invalid_weight",
            Error::EmptyPovm => "empty_povm",
            Error::InvalidCopies => "invalid_copies",
            Error::UnsupportedCopies(_) => "unsupported_copies",
            Error::BrokenBasis { .. } => "broken_basis",
            Error::CompletenessFailed(_) => "completeness_failed",
            Error::ProbabilitySum(_) => "probability_sum",
            Error::Overflow => "overflow",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Malformed(_) => "malformed_input",
        }
    }
}
