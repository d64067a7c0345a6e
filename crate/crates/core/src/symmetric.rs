//! Occupation-number basis of the `N`-copy symmetric subspace of `(C^D)^⊗N`.
//!
//! Basis vectors are labelled by occupation vectors `m` with `Σ m_i = N`,
//! enumerated in lexicographic order. The coordinate of `|ψ⟩^⊗N` along the
//! normalized vector `|m⟩` is `sqrt(N!/Π m_i!) Π ψ_i^{m_i}`.

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone)]
pub struct SymmetricSubspace {
    dim_single: usize,
    copies: u32,
    occupations: Vec<Vec<u32>>,
    coefficients: Vec<f64>,
}

impl SymmetricSubspace {
    /// Enumerates the basis, refusing when its dimension exceeds `max_dim`.
    pub fn new(dim_single: usize, copies: u32, max_dim: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidCopies);
        }
        let dim = symmetric_dim(dim_single, copies);
        if dim > max_dim as f64 {
            return Err(Error::DimensionGuard { dim: dim.min(usize::MAX as f64) as usize, max: max_dim });
        }
        let mut occupations = Vec::with_capacity(dim as usize);
        let mut current = vec![0u32; dim_single];
        enumerate(&mut current, 0, copies, &mut occupations);
        let log_fact = |k: u32| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
        let coefficients = occupations
            .iter()
            .map(|m| (0.5 * (log_fact(copies) - m.iter().map(|&k| log_fact(k)).sum::<f64>())).exp())
            .collect();
        Ok(SymmetricSubspace { dim_single, copies, occupations, coefficients })
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn dim_single(&self) -> usize {
        self.dim_single
    }

    pub fn occupations(&self) -> &[Vec<u32>] {
        &self.occupations
    }

    /// Coordinates of `|ψ⟩^⊗N` in the occupation basis.
    pub fn embed(&self, psi: &[C64]) -> Vec<C64> {
        self.occupations
            .iter()
            .zip(&self.coefficients)
            .map(|(m, &c)| {
                let mut v = C64::new(c, 0.0);
                for (z, &k) in psi.iter().zip(m) {
                    if k > 0 {
                        v *= z.powu(k);
                    }
                }
                v
            })
            .collect()
    }

    /// Embedding together with its derivative along `∂/∂z_i` (holomorphic),
    /// one column per single-copy component.
    pub fn embed_with_derivatives(&self, psi: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
        let d = self.dim_single;
        let mut val = Vec::with_capacity(self.dim());
        let mut der = vec![Vec::with_capacity(self.dim()); d];
        for (m, &c) in self.occupations.iter().zip(&self.coefficients) {
            let mut v = C64::new(c, 0.0);
            for (z, &k) in psi.iter().zip(m) {
                if k > 0 {
                    v *= z.powu(k);
                }
            }
            val.push(v);
            for (i, col) in der.iter_mut().enumerate() {
                if m[i] == 0 {
                    col.push(C64::new(0.0, 0.0));
                    continue;
                }
                let mut g = C64::new(c * m[i] as f64, 0.0);
                for (j, (z, &k)) in psi.iter().zip(m).enumerate() {
                    let e = if j == i { k - 1 } else { k };
                    if e > 0 {
                        g *= z.powu(e);
                    }
                }
                col.push(g);
            }
        }
        (val, der)
    }

    /// Normalized basis vector `|m⟩` written out in the full `D^N` tensor space
    /// (row-major over copy indices). Only for small spaces.
    pub fn basis_vector_full(&self, index: usize) -> Vec<f64> {
        let d = self.dim_single;
        let n = self.copies as usize;
        let total = d.pow(n as u32);
        let m = &self.occupations[index];
        let mut out = vec![0.0; total];
        let mut count = 0usize;
        for flat in 0..total {
            let mut occ = vec![0u32; d];
            let mut f = flat;
            for _ in 0..n {
                occ[f % d] += 1;
                f /= d;
            }
            if &occ == m {
                out[flat] = 1.0;
                count += 1;
            }
        }
        let norm = (count as f64).sqrt();
        out.iter_mut().for_each(|v| *v /= norm);
        out
    }
}

fn enumerate(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        enumerate(current, pos + 1, remaining - k, out);
    }
    current[pos] = 0;
}

/// `C(D + N − 1, N)`, computed in floating point.
pub fn symmetric_dim(dim_single: usize, copies: u32) -> f64 {
    crate::povm::binomial_f64(dim_single as u64 + copies as u64 - 1, copies as u64)
}
