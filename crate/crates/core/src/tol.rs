//! Numerical tolerances shared by construction checks and verification.

/// Construction-level checks (orthonormality, hermiticity, normalization).
pub const CONSTRUCTION: f64 = 1e-12;

/// Identities derived from the construction (d-tensor contractions, purity).
pub const DERIVED: f64 = 1e-10;

/// Largest imaginary part tolerated when a d-tensor entry is extracted as a real number.
pub const D_TENSOR_IMAG: f64 = 1e-10;

/// Maximum norm deviation accepted for an input spinor.
pub const SPINOR_NORM: f64 = 1e-8;

/// Maximum deviation of outcome probabilities from 1 before a POVM is declared invalid.
pub const PROBABILITY_SUM: f64 = 1e-6;

/// Completeness residual a POVM must meet before it is used for fidelity estimation.
pub const VALID_POVM: f64 = 1e-8;

/// Default cap on the Hilbert-space dimension `2J+1`.
pub const DEFAULT_MAX_DIM: usize = 8;

/// Default cap on the dimension of a materialized symmetric subspace.
pub const DEFAULT_MAX_SYMMETRIC_DIM: usize = 10_000;

/// Environment variable overriding [`DEFAULT_MAX_SYMMETRIC_DIM`].
pub const MAX_SYMMETRIC_DIM_ENV: &str = "SPIN_POVM_MAX_DIM";

/// Symmetric-subspace guard in effect, honouring [`MAX_SYMMETRIC_DIM_ENV`].
pub fn max_symmetric_dim() -> usize {
    std::env::var(MAX_SYMMETRIC_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_SYMMETRIC_DIM)
}
