//! Spinors and generalized Bloch vectors.
//!
//! A pure state `ρ = |ψ⟩⟨ψ|` of a spin-`J` particle is written as
//!
//! ```text
//! ρ = I/(2J+1) + sqrt(J/(2J+1)) n_a λ_a
//! ```
//!
//! with `λ_a` the SU(2J+1) generators of [`crate::sun_algebra`]. Taking
//! `Tr(· λ_a)` of both sides and using `Tr(λ_a λ_b) = 2 δ_ab` gives the
//! inversion `n_a = ½ sqrt((2J+1)/J) Tr(ρ λ_a)`. The coefficients make
//! `Tr ρ = Tr ρ² = 1` and `|n| = 1`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::Spin;
use crate::sun_algebra::{GeneratorBasis, SymmetricStructureTensor};
use crate::tol;
use crate::C64;

/// Amplitudes `x_i + i y_i` of a spin-`J` state, `i = 1 … 2J+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    spin: Spin,
    amplitudes: Vec<C64>,
}

impl Spinor {
    /// Wraps amplitudes without checking normalization.
    pub fn from_amplitudes(spin: Spin, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != spin.dim() {
            return Err(Error::DimensionMismatch { expected: spin.dim(), found: amplitudes.len() });
        }
        Ok(Spinor { spin, amplitudes })
    }

    /// Wraps amplitudes, rejecting states whose squared norm is off by more than
    /// [`tol::SPINOR_NORM`].
    pub fn new(spin: Spin, amplitudes: Vec<C64>) -> Result<Self> {
        let s = Self::from_amplitudes(spin, amplitudes)?;
        s.check_normalized()?;
        Ok(s)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(spin: Spin, amplitudes: Vec<C64>) -> Result<Self> {
        let mut s = Self::from_amplitudes(spin, amplitudes)?;
        let n = s.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Unnormalized(n * n));
        }
        s.amplitudes.iter_mut().for_each(|z| *z /= n);
        Ok(s)
    }

    pub fn from_parts(spin: Spin, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch { expected: re.len(), found: im.len() });
        }
        Self::from_amplitudes(spin, re.iter().zip(im).map(|(&x, &y)| C64::new(x, y)).collect())
    }

    /// Computational basis state `|e_k⟩` (zero-based `k`).
    pub fn basis_state(spin: Spin, k: usize) -> Result<Self> {
        let d = spin.dim();
        if k >= d {
            return Err(Error::DimensionMismatch { expected: d, found: k + 1 });
        }
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[k] = C64::new(1.0, 0.0);
        Ok(Spinor { spin, amplitudes: amps })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn re(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.im).collect()
    }

    /// `Σ_i (x_i² + y_i²)`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > tol::SPINOR_NORM || !n.is_finite() {
            return Err(Error::Unnormalized(n));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Spinor) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &Spinor) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Spinor {
        let p = C64::from_polar(1.0, theta);
        Spinor { spin: self.spin, amplitudes: self.amplitudes.iter().map(|z| z * p).collect() }
    }

    /// Applies a `D x D` matrix to the amplitudes.
    pub fn transformed(&self, u: &DMatrix<C64>) -> Spinor {
        let d = self.dim();
        let amps = (0..d)
            .map(|i| (0..d).map(|j| u[(i, j)] * self.amplitudes[j]).sum())
            .collect();
        Spinor { spin: self.spin, amplitudes: amps }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }
}

/// Real coefficient vector `n_a`, `a = 1 … 4J(J+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    spin: Spin,
    components: Vec<f64>,
}

impl BlochVector {
    pub fn new(spin: Spin, components: Vec<f64>) -> Result<Self> {
        if components.len() != spin.generator_count() {
            return Err(Error::DimensionMismatch {
                expected: spin.generator_count(),
                found: components.len(),
            });
        }
        Ok(BlochVector { spin, components })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a * b).sum()
    }
}

/// `½ sqrt((2J+1)/J)`, the factor mapping `Tr(ρ λ_a)` to `n_a`.
pub fn bloch_scale(spin: Spin) -> f64 {
    let j = spin.value();
    0.5 * ((2.0 * j + 1.0) / j).sqrt()
}

/// `(2J−1)/sqrt(J(2J+1))`, the coefficient of the purity constraint.
pub fn purity_coefficient(spin: Spin) -> f64 {
    let j = spin.value();
    (2.0 * j - 1.0) / (j * (2.0 * j + 1.0)).sqrt()
}

fn check_basis(spin: Spin, basis: &GeneratorBasis) -> Result<()> {
    if basis.spin() != spin {
        return Err(Error::SpinMismatch(spin.to_string(), basis.spin().to_string()));
    }
    Ok(())
}

/// Bloch vector of a normalized spinor in the given generator basis.
pub fn spinor_to_bloch(psi: &Spinor, basis: &GeneratorBasis) -> Result<BlochVector> {
    check_basis(psi.spin(), basis)?;
    psi.check_normalized()?;
    let k = bloch_scale(psi.spin());
    let amps = psi.amplitudes();
    let components = basis
        .generators()
        .iter()
        .map(|g| {
            // ⟨ψ|λ|ψ⟩, real for hermitian λ
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..amps.len() {
                for j in 0..amps.len() {
                    let gij = g[(i, j)];
                    if gij.re != 0.0 || gij.im != 0.0 {
                        acc += amps[i].conj() * gij * amps[j];
                    }
                }
            }
            k * acc.re
        })
        .collect();
    Ok(BlochVector { spin: psi.spin(), components })
}

/// Rebuilds `ρ = I/D + sqrt(J/D) n_a λ_a`.
pub fn bloch_to_density(n: &BlochVector, basis: &GeneratorBasis) -> Result<DMatrix<C64>> {
    check_basis(n.spin(), basis)?;
    let d = basis.dim();
    let j = n.spin().value();
    let coeff = (j / d as f64).sqrt();
    let mut rho = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for i in 0..d {
        rho[(i, i)] = C64::new(1.0 / d as f64, 0.0);
    }
    for (g, &na) in basis.generators().iter().zip(n.components()) {
        if na != 0.0 {
            rho += g * C64::new(coeff * na, 0.0);
        }
    }
    Ok(rho)
}

/// Component `c` is `Σ_ab d_abc n_a n_b − (2J−1)/sqrt(J(2J+1)) n_c`; it vanishes
/// exactly on the pure-state manifold.
pub fn purity_residual(n: &BlochVector, d: &SymmetricStructureTensor) -> Result<Vec<f64>> {
    if n.spin() != d.spin() {
        return Err(Error::SpinMismatch(n.spin().to_string(), d.spin().to_string()));
    }
    let coeff = purity_coefficient(n.spin());
    let x = n.components();
    let mut out = d.contract2(x, x);
    out.iter_mut().zip(x).for_each(|(o, &xc)| *o -= coeff * xc);
    Ok(out)
}

/// Max-norm of [`purity_residual`].
pub fn purity_residual_max(n: &BlochVector, d: &SymmetricStructureTensor) -> Result<f64> {
    Ok(purity_residual(n, d)?.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// `(Σ d_abc n_a n_b n_c, Σ d_abe d_cde n_a n_b n_c n_d)`.
pub fn cubic_quartic_checks(n: &BlochVector, d: &SymmetricStructureTensor) -> Result<(f64, f64)> {
    if n.spin() != d.spin() {
        return Err(Error::SpinMismatch(n.spin().to_string(), d.spin().to_string()));
    }
    let x = n.components();
    let cubic = d.cubic(x);
    let quartic = d.contract2(x, x).iter().map(|v| v * v).sum();
    Ok((cubic, quartic))
}

/// Values the cubic and quartic contractions take on every pure state.
pub fn pure_state_invariants(spin: Spin) -> (f64, f64) {
    let c = purity_coefficient(spin);
    (c, c * c)
}

/// `|⟨ψ|ψ′⟩|² = (1 + 2J n·m)/(2J+1)` for pure-state Bloch vectors.
pub fn bloch_overlap(n: &BlochVector, m: &BlochVector) -> Result<f64> {
    if n.spin() != m.spin() {
        return Err(Error::SpinMismatch(n.spin().to_string(), m.spin().to_string()));
    }
    let t = n.spin().twice() as f64;
    Ok((1.0 + t * n.dot(m)) / (t + 1.0))
}

/// Smallest Bloch dot product two pure states can have, `−1/(2J)`.
pub fn min_pure_dot(spin: Spin) -> f64 {
    -1.0 / spin.twice() as f64
}

/// Bloch vector of `z/|z|` for raw (unnormalized) amplitudes together with
/// its derivative with respect to the real parameters `(x_1 … x_D, y_1 … y_D)`.
///
/// Returns `(n, jac)` with `jac` of shape `K x 2D`.
pub fn bloch_with_jacobian(z: &[C64], basis: &GeneratorBasis) -> (Vec<f64>, DMatrix<f64>) {
    let d = z.len();
    let k = bloch_scale(basis.spin());
    let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let ng = basis.len();
    let mut n = vec![0.0; ng];
    let mut jac = DMatrix::<f64>::zeros(ng, 2 * d);
    let mut lz = vec![C64::new(0.0, 0.0); d];
    for (a, g) in basis.generators().iter().enumerate() {
        for (i, out) in lz.iter_mut().enumerate() {
            *out = (0..d).map(|j| g[(i, j)] * z[j]).sum();
        }
        let quad: f64 = z.iter().zip(&lz).map(|(zi, li)| (zi.conj() * li).re).sum();
        let na = k * quad / s;
        n[a] = na;
        for i in 0..d {
            jac[(a, i)] = 2.0 * k * lz[i].re / s - 2.0 * na * z[i].re / s;
            jac[(a, d + i)] = 2.0 * k * lz[i].im / s - 2.0 * na * z[i].im / s;
        }
    }
    (n, jac)
}
