//! Rank-one POVMs on the `N`-copy symmetric subspace and the conditions for
//! optimality.
//!
//! An optimal POVM `{c_r², Ψ_r}` resolves the identity on the symmetric
//! subspace, `Σ_r c_r² |Ψ_r⟩^N ⟨Ψ_r|^N = I_sym`. In Bloch form this becomes a
//! tower of moment equations, `W = (2J+N)!/(N!(2J)!)`, `K = 4J(J+1)`:
//!
//! ```text
//! Σ c_r²                   = W
//! Σ c_r² n_a               = 0
//! Σ c_r² n_a n_b           = W/K δ_ab
//! Σ c_r² n_a n_b n_c       = W/(K(2J+3)) sqrt((2J+1)/J) d_abc
//! ```
//!
//! where the order-`k` row applies for `k ≤ N`. Rows beyond the cubic one are
//! not evaluated; for `N ≥ 4` optimality is certified through
//! [`completeness_residual`] or [`basiceq_residual`].

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bloch::{spinor_to_bloch, BlochVector, Spinor};
use crate::error::{Error, Result};
use crate::montecarlo::{sample_pure_state, seeded_rng};
use crate::spin::Spin;
use crate::sun_algebra::{GeneratorBasis, SymmetricStructureTensor};
use crate::symmetric::SymmetricSubspace;
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    /// `c_r²`.
    pub weight: f64,
    pub state: Spinor,
}

/// Weighted pure states `{c_r², Ψ_r}` acting on `N` copies.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    spin: Spin,
    copies: u32,
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(spin: Spin, copies: u32, elements: Vec<PovmElement>) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidCopies);
        }
        if elements.is_empty() {
            return Err(Error::EmptyPovm);
        }
        for (index, e) in elements.iter().enumerate() {
            if !(e.weight > 0.0) || !e.weight.is_finite() {
                return Err(Error::InvalidWeight { index, value: e.weight });
            }
            if e.state.spin() != spin {
                return Err(Error::SpinMismatch(spin.to_string(), e.state.spin().to_string()));
            }
            e.state.check_normalized()?;
        }
        Ok(Povm { spin, copies, elements })
    }

    /// Elements with a common weight.
    pub fn uniform(spin: Spin, copies: u32, weight: f64, states: Vec<Spinor>) -> Result<Self> {
        Self::new(spin, copies, states.into_iter().map(|state| PovmElement { weight, state }).collect())
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    /// Number of elements `n`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.weight).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.elements.iter().map(|e| e.weight).sum()
    }

    pub fn blochs(&self, basis: &GeneratorBasis) -> Result<Vec<BlochVector>> {
        self.elements.iter().map(|e| spinor_to_bloch(&e.state, basis)).collect()
    }

    /// Copy with weights transformed by `f(index, weight)`.
    pub fn map_weights(&self, f: impl Fn(usize, f64) -> f64) -> Result<Povm> {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| PovmElement { weight: f(i, e.weight), state: e.state.clone() })
            .collect();
        Povm::new(self.spin, self.copies, elements)
    }

    /// Copy without element `index`.
    pub fn without(&self, index: usize) -> Result<Povm> {
        let mut elements = self.elements.clone();
        if index >= elements.len() {
            return Err(Error::InvalidArgument(format!("no element {index}")));
        }
        elements.remove(index);
        Povm::new(self.spin, self.copies, elements)
    }

    /// Copy acting on a different number of copies.
    pub fn with_copies(&self, copies: u32) -> Result<Povm> {
        Povm::new(self.spin, copies, self.elements.clone())
    }

    /// `Σ_r c_r² |⟨ψ|Ψ_r⟩|^{2N}`.
    pub fn outcome_mass(&self, psi: &Spinor) -> f64 {
        self.elements.iter().map(|e| e.weight * psi.overlap(&e.state).powi(self.copies as i32)).sum()
    }

    pub fn to_record(&self) -> PovmRecord {
        PovmRecord {
            spin: self.spin,
            copies: self.copies,
            elements: self
                .elements
                .iter()
                .map(|e| ElementRecord { weight: e.weight, re: e.state.re(), im: e.state.im() })
                .collect(),
        }
    }

    pub fn from_record(rec: &PovmRecord) -> Result<Self> {
        let elements = rec
            .elements
            .iter()
            .map(|e| {
                Ok(PovmElement { weight: e.weight, state: Spinor::from_parts(rec.spin, &e.re, &e.im)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Povm::new(rec.spin, rec.copies, elements)
    }

    /// Pretty-printed JSON in the POVM file format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("POVM record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: PovmRecord = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::from_record(&rec)
    }
}

/// On-disk POVM: `{"J":"1","N":2,"elements":[{"weight":…,"re":[…],"im":[…]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmRecord {
    #[serde(rename = "J")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub copies: u32,
    pub elements: Vec<ElementRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub weight: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Max-norm residuals of the optimality conditions. Moment orders above
/// `min(N, 3)` are `None`, as are checks that were not run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub order0_residual: Option<f64>,
    pub order1_residual: Option<f64>,
    pub order2_residual: Option<f64>,
    pub order3_residual: Option<f64>,
    pub completeness_residual: Option<f64>,
    pub basiceq_residual: Option<f64>,
}

impl MomentReport {
    /// Largest of the residuals that were evaluated.
    pub fn worst(&self) -> f64 {
        [
            self.order0_residual,
            self.order1_residual,
            self.order2_residual,
            self.order3_residual,
            self.completeness_residual,
            self.basiceq_residual,
        ]
        .iter()
        .flatten()
        .fold(0.0, |m: f64, &x| m.max(x))
    }

    /// Largest moment residual (orders 0 to 3 only).
    pub fn worst_moment(&self) -> f64 {
        [self.order0_residual, self.order1_residual, self.order2_residual, self.order3_residual]
            .iter()
            .flatten()
            .fold(0.0, |m: f64, &x| m.max(x))
    }
}

/// `C(n, k)` as `u128`, `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `C(n, k)` in floating point; exact while it fits in `u128`, log-gamma beyond.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    match binomial_u128(n, k) {
        Some(v) => v as f64,
        None => {
            let (n, k) = (n as f64, k as f64);
            (ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)).exp()
        }
    }
}

/// `Σ_r c_r² = (2J+N)!/(N!(2J)!)`, the dimension of the `N`-copy symmetric subspace.
pub fn weight_sum(copies: u32, spin: Spin) -> f64 {
    binomial_f64(spin.twice() as u64 + copies as u64, copies as u64)
}

/// Optimal average fidelity `(N+1)/(N+2J+1)`.
pub fn analytic_fidelity(copies: u32, spin: Spin) -> f64 {
    let n = copies as f64;
    (n + 1.0) / (n + spin.twice() as f64 + 1.0)
}

/// Number of independent scalar equations in the order-0…N system,
/// `(4J(J+1)+N)!/(N!(4J(J+1))!)`.
pub fn equation_count(copies: u32, spin: Spin) -> Result<u128> {
    if copies == 0 {
        return Err(Error::InvalidCopies);
    }
    let k = spin.generator_count() as u64;
    binomial_u128(k + copies as u64, copies as u64).ok_or(Error::Overflow)
}

/// Right-hand-side constants `(W, W/K, W sqrt((2J+1)/J)/(K(2J+3)))` of the
/// order-0, order-2 and order-3 equations.
pub fn moment_targets(copies: u32, spin: Spin) -> (f64, f64, f64) {
    let w = weight_sum(copies, spin);
    let j = spin.value();
    let k = 4.0 * j * (j + 1.0);
    let cubic = w * ((2.0 * j + 1.0) / j).sqrt() / (k * (2.0 * j + 3.0));
    (w, w / k, cubic)
}

fn check_algebra(povm: &Povm, basis: &GeneratorBasis, d: &SymmetricStructureTensor) -> Result<()> {
    for s in [basis.spin(), d.spin()] {
        if s != povm.spin() {
            return Err(Error::SpinMismatch(povm.spin().to_string(), s.to_string()));
        }
    }
    Ok(())
}

/// Moment-equation residuals of orders `0 … min(N, 3)`.
pub fn moment_residuals(
    povm: &Povm,
    basis: &GeneratorBasis,
    d: &SymmetricStructureTensor,
) -> Result<MomentReport> {
    check_algebra(povm, basis, d)?;
    let blochs = povm.blochs(basis)?;
    let weights = povm.weights();
    let k = basis.len();
    let (w, t2, t3) = moment_targets(povm.copies(), povm.spin());
    let order = povm.copies().min(3);

    let mut report = MomentReport {
        order0_residual: Some((povm.total_weight() - w).abs()),
        ..Default::default()
    };

    if order >= 1 {
        let mut worst = 0.0f64;
        for a in 0..k {
            let s: f64 = weights.iter().zip(&blochs).map(|(c, n)| c * n.components()[a]).sum();
            worst = worst.max(s.abs());
        }
        report.order1_residual = Some(worst);
    }
    if order >= 2 {
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in a..k {
                let s: f64 = weights
                    .iter()
                    .zip(&blochs)
                    .map(|(c, n)| c * n.components()[a] * n.components()[b])
                    .sum();
                let target = if a == b { t2 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        report.order2_residual = Some(worst);
    }
    if order >= 3 {
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in a..k {
                for c in b..k {
                    let s: f64 = weights
                        .iter()
                        .zip(&blochs)
                        .map(|(cw, n)| {
                            let x = n.components();
                            cw * x[a] * x[b] * x[c]
                        })
                        .sum();
                    worst = worst.max((s - t3 * d.get(a, b, c)).abs());
                }
            }
        }
        report.order3_residual = Some(worst);
    }
    Ok(report)
}

/// Max-norm of `Σ_r c_r² (|Ψ_r⟩⟨Ψ_r|)^⊗N − I` restricted to the symmetric
/// subspace, built in the occupation-number basis.
pub fn completeness_residual(povm: &Povm) -> Result<f64> {
    completeness_residual_with_max(povm, tol::max_symmetric_dim())
}

pub fn completeness_residual_with_max(povm: &Povm, max_dim: usize) -> Result<f64> {
    let sub = SymmetricSubspace::new(povm.spin().dim(), povm.copies(), max_dim)?;
    let vs: Vec<Vec<crate::C64>> =
        povm.elements().iter().map(|e| sub.embed(e.state.amplitudes())).collect();
    let weights = povm.weights();
    let dim = sub.dim();
    let mut worst = 0.0f64;
    for p in 0..dim {
        for q in p..dim {
            let mut m = crate::C64::new(0.0, 0.0);
            for (v, &w) in vs.iter().zip(&weights) {
                m += v[p] * v[q].conj() * w;
            }
            if p == q {
                m -= 1.0;
            }
            worst = worst.max(m.norm());
        }
    }
    Ok(worst)
}

/// `max_ψ |Σ_r c_r² |⟨ψ|Ψ_r⟩|^{2N} − 1|` over `samples` uniformly random `ψ`.
pub fn basiceq_residual(povm: &Povm, samples: usize, seed: u64) -> f64 {
    let mut rng = seeded_rng(seed, 0);
    (0..samples.max(1))
        .map(|_| {
            let psi = sample_pure_state(povm.spin(), &mut rng);
            (povm.outcome_mass(&psi) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Full verification: moment residuals, completeness when the symmetric
/// subspace fits under the guard, and the sampled identity check.
pub fn verify(
    povm: &Povm,
    basis: &GeneratorBasis,
    d: &SymmetricStructureTensor,
    samples: usize,
    seed: u64,
) -> Result<MomentReport> {
    let mut report = moment_residuals(povm, basis, d)?;
    report.completeness_residual = match completeness_residual(povm) {
        Ok(v) => Some(v),
        Err(Error::DimensionGuard { .. }) => None,
        Err(e) => return Err(e),
    };
    if samples > 0 {
        report.basiceq_residual = Some(basiceq_residual(povm, samples, seed));
    }
    Ok(report)
}

/// Completeness measure used to gate other operations: the exact residual when
/// the symmetric subspace is small enough, otherwise the sampled one.
pub fn resolution_residual(povm: &Povm) -> Result<f64> {
    match completeness_residual(povm) {
        Ok(v) => Ok(v),
        Err(Error::DimensionGuard { .. }) => Ok(basiceq_residual(povm, 1000, 0)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{hypertetrahedron_j1_n2, tetrahedron_j12_n2, von_neumann_povm};
    use crate::montecarlo::sample_pure_state;
    use crate::sun_algebra::{build_d_tensor, build_generator_basis};
    use crate::C64;

    fn spin(tw: u32) -> Spin {
        Spin::from_twice(tw).unwrap()
    }

    fn algebra(s: Spin) -> (GeneratorBasis, SymmetricStructureTensor) {
        let b = build_generator_basis(s).unwrap();
        let d = build_d_tensor(&b).unwrap();
        (b, d)
    }

    #[test]
    fn weight_sum_values() {
        for tw in 1..10 {
            assert_eq!(weight_sum(1, spin(tw)), tw as f64 + 1.0);
        }
        assert_eq!(weight_sum(2, Spin::ONE), 6.0);
        assert_eq!(weight_sum(3, Spin::ONE), 10.0);
        assert_eq!(weight_sum(2, Spin::HALF), 3.0);
        // log-gamma branch
        let big = weight_sum(200, spin(100));
        let exact = (ln_gamma(301.0) - ln_gamma(201.0) - ln_gamma(101.0)).exp();
        assert!((big / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_values() {
        assert!((analytic_fidelity(1, Spin::HALF) - 2.0 / 3.0).abs() < 1e-15);
        assert!((analytic_fidelity(2, Spin::ONE) - 0.6).abs() < 1e-15);
        let mut prev = 0.0;
        for n in 1..200 {
            let f = analytic_fidelity(n, spin(3));
            assert!(f > prev && f < 1.0);
            prev = f;
        }
    }

    #[test]
    fn equation_counts() {
        assert_eq!(equation_count(1, Spin::HALF).unwrap(), 4);
        assert_eq!(equation_count(1, Spin::ONE).unwrap(), 9);
        for tw in 1..=4u32 {
            let j = tw as f64 / 2.0;
            let closed = (2.0 * j + 1.0).powi(2) * (2.0 * j * j + 2.0 * j + 1.0);
            assert_eq!(equation_count(2, spin(tw)).unwrap() as f64, closed);
        }
        assert_eq!(equation_count(0, Spin::ONE), Err(Error::InvalidCopies));
        assert_eq!(equation_count(200, spin(200)), Err(Error::Overflow));
    }

    #[test]
    fn rejects_bad_povms() {
        let e = Spinor::basis_state(Spin::ONE, 0).unwrap();
        assert_eq!(Povm::new(Spin::ONE, 1, vec![]), Err(Error::EmptyPovm));
        assert!(matches!(
            Povm::new(Spin::ONE, 1, vec![PovmElement { weight: 0.0, state: e.clone() }]),
            Err(Error::InvalidWeight { index: 0, .. })
        ));
        assert!(matches!(
            Povm::new(Spin::ONE, 1, vec![PovmElement { weight: -1.0, state: e.clone() }]),
            Err(Error::InvalidWeight { .. })
        ));
        assert_eq!(
            Povm::new(Spin::ONE, 0, vec![PovmElement { weight: 1.0, state: e }]),
            Err(Error::InvalidCopies)
        );
    }

    #[test]
    fn von_neumann_moments() {
        let (b, d) = algebra(Spin::ONE);
        let r = moment_residuals(&von_neumann_povm(Spin::ONE), &b, &d).unwrap();
        assert!(r.order0_residual.unwrap() < 1e-12);
        assert!(r.order1_residual.unwrap() < 1e-12);
        assert!(r.order2_residual.is_none() && r.order3_residual.is_none());
    }

    #[test]
    fn hypertetrahedron_moments() {
        let (b, d) = algebra(Spin::ONE);
        let r = moment_residuals(&hypertetrahedron_j1_n2(), &b, &d).unwrap();
        assert!(r.worst_moment() < tol::DERIVED, "{r:?}");
        assert!(r.order2_residual.is_some() && r.order3_residual.is_none());
    }

    #[test]
    fn single_element_order0() {
        let (b, d) = algebra(Spin::HALF);
        let p = Povm::uniform(Spin::HALF, 1, 1.0, vec![Spinor::basis_state(Spin::HALF, 0).unwrap()])
            .unwrap();
        let r = moment_residuals(&p, &b, &d).unwrap();
        assert!((r.order0_residual.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn completeness_of_catalog() {
        assert!(completeness_residual(&von_neumann_povm(Spin::ONE)).unwrap() < 1e-12);
        assert!(completeness_residual(&hypertetrahedron_j1_n2()).unwrap() < tol::DERIVED);
        assert!(completeness_residual(&tetrahedron_j12_n2()).unwrap() < tol::DERIVED);
        let dropped = hypertetrahedron_j1_n2().without(4).unwrap();
        assert!(completeness_residual(&dropped).unwrap() >= 0.1);
    }

    #[test]
    fn completeness_guard() {
        let p = von_neumann_povm(Spin::ONE);
        assert!(matches!(
            completeness_residual_with_max(&p, 2),
            Err(Error::DimensionGuard { dim: 3, max: 2 })
        ));
    }

    #[test]
    fn basiceq_values() {
        assert!(basiceq_residual(&von_neumann_povm(Spin::ONE), 1000, 1) < 1e-12);
        let h = hypertetrahedron_j1_n2();
        assert!(basiceq_residual(&h, 1000, 1) < tol::DERIVED);
        let scaled = h.map_weights(|_, w| 0.9 * w).unwrap();
        let r = basiceq_residual(&scaled, 1000, 1);
        assert!((r - 0.1).abs() < 1e-10, "{r}");
        assert_eq!(basiceq_residual(&h, 50, 7), basiceq_residual(&h, 50, 7));
    }

    #[test]
    fn sampled_and_exact_checks_scale_together() {
        let h = hypertetrahedron_j1_n2();
        for delta in [1e-2, 1e-4, 1e-6] {
            let p = h.map_weights(|_, w| w * (1.0 + delta)).unwrap();
            let c = completeness_residual(&p).unwrap();
            let s = basiceq_residual(&p, 1000, 3);
            // uniform scaling: M − I = δ·I exactly, and every ψ sees mass 1 + δ
            assert!((c - delta).abs() < 1e-10 * delta.max(1.0));
            assert!((s - delta).abs() < 1e-10);
        }
    }

    #[test]
    fn order2_trace_reproduces_order0() {
        let (b, _) = algebra(Spin::ONE);
        let mut rng = seeded_rng(2, 0);
        for _ in 0..20 {
            let els: Vec<PovmElement> = (0..7)
                .map(|i| PovmElement {
                    weight: 0.2 + 0.1 * i as f64,
                    state: sample_pure_state(Spin::ONE, &mut rng),
                })
                .collect();
            let p = Povm::new(Spin::ONE, 2, els).unwrap();
            let blochs = p.blochs(&b).unwrap();
            let trace: f64 = p
                .weights()
                .iter()
                .zip(&blochs)
                .map(|(w, n)| w * n.components().iter().map(|x| x * x).sum::<f64>())
                .sum();
            let (_, t2, _) = moment_targets(2, Spin::ONE);
            // Σ_a target_aa = K·W/K = W
            assert!((t2 * 8.0 - weight_sum(2, Spin::ONE)).abs() < 1e-12);
            assert!((trace - p.total_weight()).abs() < 1e-12);
        }
    }

    #[test]
    fn n1_first_moments_plus_purity_imply_completeness() {
        // three coplanar spin-1/2 Bloch vectors with Σ w n = 0, Σ w = 2
        let b = build_generator_basis(Spin::HALF).unwrap();
        let mut rng = seeded_rng(8, 0);
        use rand::Rng;
        for _ in 0..25 {
            let t1: f64 = rng.random_range(0.3..2.5);
            let t2: f64 = t1 + rng.random_range(0.3..(6.0 - t1).min(3.0));
            let angles = [0.0f64, t1, t2];
            if angles.windows(2).any(|w| w[1] - w[0] >= std::f64::consts::PI)
                || 2.0 * std::f64::consts::PI - t2 >= std::f64::consts::PI
            {
                continue;
            }
            let vecs: Vec<[f64; 2]> = angles.iter().map(|a| [a.cos(), a.sin()]).collect();
            // solve w1 v1 + w2 v2 = -v3 (w3 = 1), then rescale to Σ w = 2
            let det = vecs[0][0] * vecs[1][1] - vecs[0][1] * vecs[1][0];
            let w1 = (-vecs[2][0] * vecs[1][1] + vecs[2][1] * vecs[1][0]) / det;
            let w2 = (-vecs[0][0] * vecs[2][1] + vecs[0][1] * vecs[2][0]) / det;
            let raw = [w1, w2, 1.0];
            assert!(raw.iter().all(|w| *w > 0.0));
            let total: f64 = raw.iter().sum();
            // random rotation of the plane into 3D via a random unitary on the spinors
            let u = crate::montecarlo::random_unitary(2, &mut rng);
            let els: Vec<PovmElement> = vecs
                .iter()
                .zip(raw)
                .map(|(v, w)| {
                    // spinor with Bloch vector (cos θ, sin θ, 0)
                    let theta = v[1].atan2(v[0]);
                    let s = 0.5f64.sqrt();
                    let psi = Spinor::new(
                        Spin::HALF,
                        vec![C64::new(s, 0.0), C64::from_polar(s, theta)],
                    )
                    .unwrap();
                    PovmElement { weight: 2.0 * w / total, state: psi.transformed(&u) }
                })
                .collect();
            let p = Povm::new(Spin::HALF, 1, els).unwrap();
            let (_, d) = algebra(Spin::HALF);
            let r = moment_residuals(&p, &b, &d).unwrap();
            assert!(r.order0_residual.unwrap() < 1e-12 && r.order1_residual.unwrap() < 1e-12);
            assert!(completeness_residual(&p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let h = hypertetrahedron_j1_n2();
        let text = h.to_json();
        let back = Povm::from_json(&text).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_json(), text);
        assert!(text.contains("\"J\": \"1\""));
        assert!(matches!(Povm::from_json("{\"J\":\"1\"}"), Err(Error::Malformed(_))));
        assert!(matches!(
            Povm::from_json(r#"{"J":"1","N":1,"elements":[{"weight":1,"re":[1,0],"im":[0,0]}]}"#),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
