//! Generalized Gell-Mann generators of SU(D) and their symmetric structure tensor.
//!
//! Generators are normalized by `Tr(λ_a λ_b) = 2 δ_ab` and ordered level by
//! level: for `k = 2..=D` the symmetric and antisymmetric off-diagonal pairs
//! `(j, k)` with `j < k`, followed by the diagonal generator of level `k`.
//! At `D = 2` this is `(σ_x, σ_y, σ_z)`; at `D = 3` it is the textbook
//! Gell-Mann ordering `λ_1 … λ_8`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spin::Spin;
use crate::tol;
use crate::C64;

/// The `D^2 - 1` hermitian, traceless generators of SU(D).
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    spin: Spin,
    generators: Vec<DMatrix<C64>>,
}

impl GeneratorBasis {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    /// Number of generators, `D^2 - 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[DMatrix<C64>] {
        &self.generators
    }

    pub fn generator(&self, a: usize) -> &DMatrix<C64> {
        &self.generators[a]
    }

    /// Largest deviation of `Tr(λ_a λ_b)` from `2 δ_ab`.
    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.len();
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in a..k {
                let t = trace_product(&self.generators[a], &self.generators[b]);
                let target = if a == b { 2.0 } else { 0.0 };
                worst = worst.max((t - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest deviation from hermiticity or tracelessness over all generators.
    pub fn hermiticity_residual(&self) -> f64 {
        self.generators
            .iter()
            .map(|g| {
                let herm = (g - g.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
                herm.max(g.trace().norm())
            })
            .fold(0.0, f64::max)
    }

    /// Basis with generators re-ordered and re-signed: `λ'_i = s_i λ_{p_i}`,
    /// `order[i] = (p_i, s_i)` with zero-based `p_i` and `s_i = ±1`.
    ///
    /// Any such signed permutation is again an orthonormal generator basis.
    pub fn relabeled(&self, order: &[(usize, f64)]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: order.len() });
        }
        let mut seen = vec![false; self.len()];
        let mut generators = Vec::with_capacity(self.len());
        for &(p, s) in order {
            if p >= self.len() || seen[p] || (s.abs() - 1.0).abs() > 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "not a signed permutation entry: ({p}, {s})"
                )));
            }
            seen[p] = true;
            generators.push(self.generators[p].map(|z| z * s));
        }
        Ok(GeneratorBasis { spin: self.spin, generators })
    }

    /// `Tr(ρ λ_a)` for every generator, for a hermitian `ρ`.
    pub fn expectations(&self, rho: &DMatrix<C64>) -> Vec<f64> {
        self.generators.iter().map(|g| trace_product(rho, g).re).collect()
    }
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Builds the generalized Gell-Mann basis for spin `J`, with `2J+1` capped at
/// [`tol::DEFAULT_MAX_DIM`].
pub fn build_generator_basis(spin: Spin) -> Result<GeneratorBasis> {
    build_generator_basis_with_max(spin, tol::DEFAULT_MAX_DIM)
}

pub fn build_generator_basis_with_max(spin: Spin, max_dim: usize) -> Result<GeneratorBasis> {
    let d = spin.dim();
    if d > max_dim {
        return Err(Error::DimensionGuard { dim: d, max: max_dim });
    }
    let zero = C64::new(0.0, 0.0);
    let mut generators = Vec::with_capacity(d * d - 1);
    for k in 1..d {
        for j in 0..k {
            let mut sym = DMatrix::from_element(d, d, zero);
            sym[(j, k)] = C64::new(1.0, 0.0);
            sym[(k, j)] = C64::new(1.0, 0.0);
            generators.push(sym);

            let mut asym = DMatrix::from_element(d, d, zero);
            asym[(j, k)] = C64::new(0.0, -1.0);
            asym[(k, j)] = C64::new(0.0, 1.0);
            generators.push(asym);
        }
        // diag(1, …, 1, -k, 0, …) scaled to trace norm 2
        let scale = (2.0 / ((k * (k + 1)) as f64)).sqrt();
        let mut diag = DMatrix::from_element(d, d, zero);
        for i in 0..k {
            diag[(i, i)] = C64::new(scale, 0.0);
        }
        diag[(k, k)] = C64::new(-(k as f64) * scale, 0.0);
        generators.push(diag);
    }
    Ok(GeneratorBasis { spin, generators })
}

/// Totally symmetric structure constants `d_abc`, defined by
/// `{λ_a, λ_b} = (4/D) δ_ab I + 2 d_abc λ_c`.
///
/// Stored sparsely under sorted index triples; `entries` holds every
/// permutation of every nonzero triple for contractions.
#[derive(Debug, Clone)]
pub struct SymmetricStructureTensor {
    spin: Spin,
    size: usize,
    canonical: BTreeMap<(usize, usize, usize), f64>,
    entries: Vec<(usize, usize, usize, f64)>,
}

/// Entries below this magnitude are treated as structural zeros.
const D_ZERO: f64 = 1e-14;

impl SymmetricStructureTensor {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    /// Number of generator indices, `D^2 - 1`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        let mut k = [a, b, c];
        k.sort_unstable();
        self.canonical.get(&(k[0], k[1], k[2])).copied().unwrap_or(0.0)
    }

    /// Nonzero entries with sorted indices `a <= b <= c`.
    pub fn canonical_entries(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        self.canonical.iter().map(|(k, v)| (*k, *v))
    }

    /// Nonzero entries over all index orderings.
    pub fn entries(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.canonical.len()
    }

    /// `Σ_ab d_abc x_a y_b` for every `c`.
    pub fn contract2(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for &(a, b, c, v) in &self.entries {
            out[c] += v * x[a] * y[b];
        }
        out
    }

    /// `Σ_abc d_abc x_a x_b x_c`.
    pub fn cubic(&self, x: &[f64]) -> f64 {
        self.entries.iter().map(|&(a, b, c, v)| v * x[a] * x[b] * x[c]).sum()
    }

    /// `Σ_b d_abb` for every `a`.
    pub fn traces(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for &(a, b, c, v) in &self.entries {
            if b == c {
                out[a] += v;
            }
        }
        out
    }

    /// The matrix `G_ad = Σ_bc d_abc d_dbc`.
    pub fn contraction_gram(&self) -> DMatrix<f64> {
        let k = self.size;
        let mut slices = DMatrix::<f64>::zeros(k, k * k);
        for &(a, b, c, v) in &self.entries {
            slices[(a, b * k + c)] = v;
        }
        &slices * slices.transpose()
    }

    /// Dense `K x K x K` array, flattened as `a*K*K + b*K + c`.
    pub fn dense(&self) -> Vec<f64> {
        let k = self.size;
        let mut out = vec![0.0; k * k * k];
        for &(a, b, c, v) in &self.entries {
            out[(a * k + b) * k + c] = v;
        }
        out
    }

    /// `Σ_abc d_abc^2`.
    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|e| e.3 * e.3).sum()
    }
}

/// Evaluates `d_abc = ¼ Tr({λ_a, λ_b} λ_c)` for every sorted triple.
///
/// Fails with [`Error::BrokenBasis`] when an entry comes out with a
/// non-negligible imaginary part.
pub fn build_d_tensor(basis: &GeneratorBasis) -> Result<SymmetricStructureTensor> {
    let k = basis.len();
    let g = basis.generators();
    let mut canonical = BTreeMap::new();
    for a in 0..k {
        for b in a..k {
            let anti = &g[a] * &g[b] + &g[b] * &g[a];
            for c in b..k {
                let v = trace_product(&anti, &g[c]) * 0.25;
                if v.im.abs() > tol::D_TENSOR_IMAG {
                    return Err(Error::BrokenBasis { a, b, c, imag: v.im });
                }
                if v.re.abs() > D_ZERO {
                    canonical.insert((a, b, c), v.re);
                }
            }
        }
    }
    let mut entries = Vec::new();
    for (&(a, b, c), &v) in &canonical {
        let mut perms = vec![(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)];
        perms.sort_unstable();
        perms.dedup();
        entries.extend(perms.into_iter().map(|(x, y, z)| (x, y, z, v)));
    }
    Ok(SymmetricStructureTensor { spin: basis.spin(), size: k, canonical, entries })
}

/// `(2J-1)(2J+3)/(2J+1)`, the value of `Σ_bc d_abc d_abc` for each `a`.
pub fn d_contraction_constant(spin: Spin) -> f64 {
    let t = spin.twice() as f64;
    (t - 1.0) * (t + 3.0) / (t + 1.0)
}

/// Residuals of the two trace identities of the d tensor:
/// `(max_a |Σ_b d_abb|, max_ad |Σ_bc d_abc d_dbc − const·δ_ad|)`.
pub fn d_identity_residuals(d: &SymmetricStructureTensor) -> (f64, f64) {
    let trace = d.traces().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gram = d.contraction_gram();
    let c = d_contraction_constant(d.spin());
    let mut contraction = 0.0f64;
    for a in 0..d.size() {
        for b in 0..d.size() {
            let target = if a == b { c } else { 0.0 };
            contraction = contraction.max((gram[(a, b)] - target).abs());
        }
    }
    (trace, contraction)
}

/// Largest entrywise gap between `{λ_a, λ_b}` and its expansion
/// `(4/D) δ_ab I + 2 d_abc λ_c`.
pub fn anticommutator_residual(basis: &GeneratorBasis, d: &SymmetricStructureTensor) -> f64 {
    let k = basis.len();
    let dim = basis.dim();
    let g = basis.generators();
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in a..k {
            let direct = &g[a] * &g[b] + &g[b] * &g[a];
            let mut expanded = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
            if a == b {
                for i in 0..dim {
                    expanded[(i, i)] += C64::new(4.0 / dim as f64, 0.0);
                }
            }
            for c in 0..k {
                let v = d.get(a, b, c);
                if v != 0.0 {
                    expanded += &g[c] * C64::new(2.0 * v, 0.0);
                }
            }
            let gap = (direct - expanded).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            worst = worst.max(gap);
        }
    }
    worst
}
