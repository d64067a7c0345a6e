//! Optimal and minimal rank-one POVMs for `N` identical copies of a spin-`J`
//! pure state.
//!
//! Pure states of a spin-`J` particle are represented by generalized Bloch
//! vectors in the adjoint of SU(2J+1). In that representation the conditions
//! for an optimal measurement become a short tower of moment equations on the
//! element Bloch vectors, and simple positivity arguments give lower bounds on
//! the number of elements.
//!
//! Module map:
//!
//! - [`sun_algebra`]: generalized Gell-Mann generators and the symmetric `d` tensor.
//! - [`bloch`]: spinors, Bloch vectors, purity constraint and overlaps.
//! - [`symmetric`]: occupation-number basis of the `N`-copy symmetric subspace.
//! - [`povm`]: the POVM model, moment equations and completeness checks.
//! - [`montecarlo`]: uniform pure-state sampling and fidelity estimation.
//! - [`catalog`]: explicit solutions and analytic lower bounds.
//! - [`solver`]: numerical feasibility search over `(J, N, n)`.

#![forbid(unsafe_code)]

pub mod bloch;
pub mod catalog;
pub mod error;
pub mod montecarlo;
pub mod povm;
pub mod solver;
pub mod spin;
pub mod sun_algebra;
pub mod symmetric;
pub mod tol;

pub use error::{Error, Result};
pub use spin::Spin;

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
