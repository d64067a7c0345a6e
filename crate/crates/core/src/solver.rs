//! Feasibility search for optimal POVMs with a prescribed number of elements.
//!
//! The unknowns are, per element, the raw amplitudes `z ∈ C^D` (the state is
//! `z/|z|`) and a weight `c² = softplus(u)`. The residual vector stacks the
//! moment equations of orders `0 … min(N, 3)` and the entries of
//! `Σ c² (|Ψ⟩⟨Ψ|)^⊗N − I` on the symmetric subspace; when that subspace is too
//! large to materialize, the identity is instead imposed on a fixed set of
//! random probe states. Residual entries carry multiplicity weights so that
//! `|r|` is the Frobenius norm of each residual tensor, which is invariant
//! under a global unitary acting on all states.
//!
//! Minimization is Levenberg-Marquardt with an analytic Jacobian and random
//! restarts. A result is only reported feasible after [`crate::povm::verify`]
//! has checked it independently.

use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_with_jacobian, Spinor};
use crate::catalog::{conjectured_scaling, min_projector_bound};
use crate::error::{Error, Result};
use crate::montecarlo::{sample_pure_state, seeded_rng};
use crate::povm::{moment_targets, verify, MomentReport, Povm, PovmElement};
use crate::spin::Spin;
use crate::sun_algebra::{build_d_tensor, build_generator_basis, GeneratorBasis, SymmetricStructureTensor};
use crate::symmetric::SymmetricSubspace;
use crate::tol;
use crate::C64;

/// Method string recorded in every [`SearchResult`].
pub const METHOD: &str = "levenberg-marquardt, analytic jacobian, random restarts";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Feasibility threshold on the residual norm.
    pub tolerance: f64,
    pub seed: u64,
    /// Clamp weights to the known per-element caps (`N ≤ 3`).
    pub enforce_weight_caps: bool,
    /// Probe states used when the symmetric subspace exceeds the guard.
    pub probe_states: usize,
    /// Restarts evaluated together before checking for a feasible result.
    pub batch: usize,
    /// Stop after the first batch that produced a feasible result.
    pub stop_at_first_feasible: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 100,
            max_iterations: 500,
            tolerance: 1e-8,
            seed: 0,
            enforce_weight_caps: false,
            probe_states: 256,
            batch: 8,
            stop_at_first_feasible: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.batch == 0 {
            return Err(Error::InvalidArgument("batch must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: Povm,
    pub best_residual: f64,
    pub feasible: bool,
    pub restarts_used: usize,
    pub trace: Vec<RestartTrace>,
    /// Independent check of `best` by the verification routines.
    pub verification: MomentReport,
    pub method: &'static str,
}

/// Residual vector and Jacobian of the moment/completeness system for fixed
/// `(J, N, n)`.
pub struct Objective {
    spin: Spin,
    copies: u32,
    elements: usize,
    basis: GeneratorBasis,
    d: Option<SymmetricStructureTensor>,
    order: u32,
    pairs: Vec<(usize, usize, f64)>,
    triples: Vec<(usize, usize, usize, f64)>,
    completeness: Completeness,
    targets: Vec<f64>,
}

enum Completeness {
    Subspace { sub: SymmetricSubspace, entries: Vec<(usize, usize, bool, f64)> },
    Probes(Vec<Spinor>),
}

fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u
    } else {
        u.exp().ln_1p()
    }
}

fn softplus_inv(w: f64) -> f64 {
    if w > 30.0 {
        w
    } else {
        w.exp_m1().ln()
    }
}

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

impl Objective {
    pub fn new(spin: Spin, copies: u32, elements: usize, probe_states: usize, probe_seed: u64) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidCopies);
        }
        if elements == 0 {
            return Err(Error::EmptyPovm);
        }
        let basis = build_generator_basis(spin)?;
        let order = copies.min(3);
        let d = if order >= 3 { Some(build_d_tensor(&basis)?) } else { None };
        let k = basis.len();
        let (w, t2, t3) = moment_targets(copies, spin);

        let mut targets = vec![w];
        if order >= 1 {
            targets.extend(std::iter::repeat_n(0.0, k));
        }
        let mut pairs = Vec::new();
        if order >= 2 {
            for a in 0..k {
                for b in a..k {
                    let m = if a == b { 1.0 } else { 2f64.sqrt() };
                    pairs.push((a, b, m));
                    targets.push(if a == b { m * t2 } else { 0.0 });
                }
            }
        }
        let mut triples = Vec::new();
        if let Some(d) = &d {
            for a in 0..k {
                for b in a..k {
                    for c in b..k {
                        let perms = match (a == b, b == c) {
                            (true, true) => 1.0,
                            (false, false) => 6.0,
                            _ => 3.0,
                        };
                        let m = f64::sqrt(perms);
                        triples.push((a, b, c, m));
                        targets.push(m * t3 * d.get(a, b, c));
                    }
                }
            }
        }
        let completeness = match SymmetricSubspace::new(spin.dim(), copies, tol::max_symmetric_dim()) {
            Ok(sub) => {
                let mut entries = Vec::new();
                for p in 0..sub.dim() {
                    for q in p..sub.dim() {
                        if p == q {
                            entries.push((p, q, false, 1.0));
                            targets.push(1.0);
                        } else {
                            entries.push((p, q, false, 2f64.sqrt()));
                            entries.push((p, q, true, 2f64.sqrt()));
                            targets.extend([0.0, 0.0]);
                        }
                    }
                }
                Completeness::Subspace { sub, entries }
            }
            Err(Error::DimensionGuard { .. }) => {
                let mut rng = seeded_rng(probe_seed, u64::MAX);
                let probes: Vec<Spinor> =
                    (0..probe_states.max(1)).map(|_| sample_pure_state(spin, &mut rng)).collect();
                targets.extend(std::iter::repeat_n(1.0, probes.len()));
                Completeness::Probes(probes)
            }
            Err(e) => return Err(e),
        };
        Ok(Objective { spin, copies, elements, basis, d, order, pairs, triples, completeness, targets })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn basis(&self) -> &GeneratorBasis {
        &self.basis
    }

    /// Parameters per element: `2D` amplitude components and one weight.
    pub fn block(&self) -> usize {
        2 * self.spin.dim() + 1
    }

    pub fn param_count(&self) -> usize {
        self.elements * self.block()
    }

    pub fn residual_count(&self) -> usize {
        self.targets.len()
    }

    /// Contributions of one element (before weighting) and their derivatives
    /// with respect to its `2D` amplitude parameters.
    fn element_terms(&self, z: &[C64], want_jac: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
        let dim = z.len();
        let (n, dn) = bloch_with_jacobian(z, &self.basis);
        let len = self.targets.len();
        let mut t = Vec::with_capacity(len);
        let mut jac = want_jac.then(|| DMatrix::<f64>::zeros(len, 2 * dim));
        let mut row = 0usize;

        t.push(1.0);
        row += 1;
        if self.order >= 1 {
            for a in 0..n.len() {
                t.push(n[a]);
                if let Some(j) = jac.as_mut() {
                    for p in 0..2 * dim {
                        j[(row, p)] = dn[(a, p)];
                    }
                }
                row += 1;
            }
        }
        for &(a, b, m) in &self.pairs {
            t.push(m * n[a] * n[b]);
            if let Some(j) = jac.as_mut() {
                for p in 0..2 * dim {
                    j[(row, p)] = m * (dn[(a, p)] * n[b] + n[a] * dn[(b, p)]);
                }
            }
            row += 1;
        }
        for &(a, b, c, m) in &self.triples {
            t.push(m * n[a] * n[b] * n[c]);
            if let Some(j) = jac.as_mut() {
                for p in 0..2 * dim {
                    j[(row, p)] = m
                        * (dn[(a, p)] * n[b] * n[c] + n[a] * dn[(b, p)] * n[c] + n[a] * n[b] * dn[(c, p)]);
                }
            }
            row += 1;
        }

        let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let nn = self.copies as f64;
        match &self.completeness {
            Completeness::Subspace { sub, entries } => {
                let (u, du) = sub.embed_with_derivatives(z);
                let scale = s.powf(-nn / 2.0);
                let dscale = -nn * s.powf(-nn / 2.0 - 1.0);
                let v: Vec<C64> = u.iter().map(|x| x * scale).collect();
                // ∂v/∂x_i and ∂v/∂y_i
                let dv: Option<Vec<Vec<C64>>> = want_jac.then(|| {
                    let mut cols = Vec::with_capacity(2 * dim);
                    for i in 0..dim {
                        cols.push(
                            du[i].iter().zip(&u).map(|(g, x)| g * scale + x * (dscale * z[i].re)).collect(),
                        );
                    }
                    for i in 0..dim {
                        let iu = C64::new(0.0, 1.0);
                        cols.push(
                            du[i].iter().zip(&u).map(|(g, x)| g * iu * scale + x * (dscale * z[i].im)).collect(),
                        );
                    }
                    cols
                });
                for &(p, q, imag, m) in entries {
                    let val = v[p] * v[q].conj();
                    t.push(m * if imag { val.im } else { val.re });
                    if let (Some(j), Some(dv)) = (jac.as_mut(), dv.as_ref()) {
                        for (col, d) in dv.iter().enumerate() {
                            let dval = d[p] * v[q].conj() + v[p] * d[q].conj();
                            j[(row, col)] = m * if imag { dval.im } else { dval.re };
                        }
                    }
                    row += 1;
                }
            }
            Completeness::Probes(probes) => {
                for phi in probes {
                    let a: C64 = phi.amplitudes().iter().zip(z).map(|(f, zi)| f.conj() * zi).sum();
                    let ov = a.norm_sqr() / s;
                    t.push(ov.powi(self.copies as i32));
                    if let Some(j) = jac.as_mut() {
                        let pre = nn * ov.powi(self.copies as i32 - 1);
                        for i in 0..dim {
                            let fc = phi.amplitudes()[i].conj();
                            let dax = 2.0 * (a.conj() * fc).re;
                            let day = 2.0 * (a.conj() * C64::new(0.0, 1.0) * fc).re;
                            j[(row, i)] = pre * (dax / s - a.norm_sqr() * 2.0 * z[i].re / (s * s));
                            j[(row, dim + i)] = pre * (day / s - a.norm_sqr() * 2.0 * z[i].im / (s * s));
                        }
                    }
                    row += 1;
                }
            }
        }
        debug_assert_eq!(row, len);
        (t, jac)
    }

    fn unpack<'a>(&self, x: &'a [f64]) -> impl Iterator<Item = (Vec<C64>, f64)> + 'a {
        let dim = self.spin.dim();
        let block = self.block();
        x.chunks(block).map(move |c| {
            let z = (0..dim).map(|i| C64::new(c[i], c[dim + i])).collect();
            (z, c[2 * dim])
        })
    }

    /// Residual vector at `x`.
    pub fn residuals(&self, x: &[f64]) -> DVector<f64> {
        self.evaluate(x, false).0
    }

    /// Residual vector and (optionally) its Jacobian at `x`.
    pub fn evaluate(&self, x: &[f64], want_jac: bool) -> (DVector<f64>, Option<DMatrix<f64>>) {
        let m = self.targets.len();
        let block = self.block();
        let dim = self.spin.dim();
        let mut r = DVector::from_iterator(m, self.targets.iter().map(|t| -t));
        let mut jac = want_jac.then(|| DMatrix::<f64>::zeros(m, self.param_count()));
        for (e, (z, u)) in self.unpack(x).enumerate() {
            let w = softplus(u);
            let (t, dt) = self.element_terms(&z, want_jac);
            for i in 0..m {
                r[i] += w * t[i];
            }
            if let (Some(j), Some(dt)) = (jac.as_mut(), dt) {
                let col0 = e * block;
                let dw = sigmoid(u);
                for i in 0..m {
                    for p in 0..2 * dim {
                        j[(i, col0 + p)] = w * dt[(i, p)];
                    }
                    j[(i, col0 + 2 * dim)] = dw * t[i];
                }
            }
        }
        (r, jac)
    }

    /// `½ |r|²`.
    pub fn cost(&self, x: &[f64]) -> f64 {
        0.5 * self.residuals(x).norm_squared()
    }

    /// Gradient of [`Objective::cost`], `Jᵀ r`.
    pub fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let (r, j) = self.evaluate(x, true);
        j.expect("jacobian requested").transpose() * r
    }

    /// Random starting point: uniform states, weights near `W/n`.
    pub fn initial_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let w = moment_targets(self.copies, self.spin).0 / self.elements as f64;
        let dim = self.spin.dim();
        let mut x = Vec::with_capacity(self.param_count());
        for _ in 0..self.elements {
            let psi = sample_pure_state(self.spin, rng);
            x.extend(psi.amplitudes().iter().map(|z| z.re));
            x.extend(psi.amplitudes().iter().map(|z| z.im));
            let jitter: f64 = rng.sample(StandardNormal);
            x.push(softplus_inv(w * (0.1 * jitter).exp()));
        }
        debug_assert_eq!(x.len(), self.elements * (2 * dim + 1));
        x
    }

    /// Rescales every amplitude block to unit norm.
    pub fn normalize(&self, x: &mut [f64]) {
        let dim = self.spin.dim();
        for c in x.chunks_mut(self.block()) {
            let n = c[..2 * dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                c[..2 * dim].iter_mut().for_each(|v| *v /= n);
            }
        }
    }

    fn clamp_weights(&self, x: &mut [f64], cap: f64) {
        let umax = softplus_inv(cap);
        let dim = self.spin.dim();
        for c in x.chunks_mut(self.block()) {
            c[2 * dim] = c[2 * dim].min(umax);
        }
    }

    /// POVM described by parameter vector `x`.
    pub fn to_povm(&self, x: &[f64]) -> Result<Povm> {
        let elements = self
            .unpack(x)
            .map(|(z, u)| Ok(PovmElement { weight: softplus(u), state: Spinor::normalized(self.spin, z)? }))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(self.spin, self.copies, elements)
    }
}

struct RestartOutcome {
    x: Vec<f64>,
    residual: f64,
    iterations: usize,
}

fn levenberg_marquardt(obj: &Objective, mut x: Vec<f64>, cfg: &SearchConfig, cap: Option<f64>) -> RestartOutcome {
    obj.normalize(&mut x);
    if let Some(c) = cap {
        obj.clamp_weights(&mut x, c);
    }
    let (mut r, mut jac) = obj.evaluate(&x, true);
    let mut cost = 0.5 * r.norm_squared();
    let mut mu = 1e-3;
    let mut stalled = 0usize;
    let stop = cfg.tolerance * 1e-3;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        if r.norm() < stop {
            break;
        }
        let j = jac.as_ref().expect("jacobian");
        let jt = j.transpose();
        let a = &jt * j;
        let g = &jt * &r;
        let mut improved = false;
        while mu < 1e12 {
            let mut damped = a.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += mu * (a[(i, i)] + 1e-9);
            }
            let Some(chol) = damped.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&g));
            let mut trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            obj.normalize(&mut trial);
            if let Some(c) = cap {
                obj.clamp_weights(&mut trial, c);
            }
            let (r_new, jac_new) = obj.evaluate(&trial, true);
            let cost_new = 0.5 * r_new.norm_squared();
            if cost_new.is_finite() && cost_new < cost {
                stalled = if cost - cost_new < 1e-9 * cost { stalled + 1 } else { 0 };
                x = trial;
                r = r_new;
                jac = jac_new;
                cost = cost_new;
                mu = (mu / 3.0).max(1e-12);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved || stalled >= 25 {
            break;
        }
    }
    RestartOutcome { x, residual: r.norm(), iterations }
}

/// Searches for an `n`-element POVM on `N` copies of spin `J` satisfying the
/// optimality conditions. Infeasibility is reported in the result, not as an
/// error.
pub fn search_povm(spin: Spin, copies: u32, elements: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let obj = Objective::new(spin, copies, elements, cfg.probe_states, cfg.seed)?;
    let cap = if cfg.enforce_weight_caps {
        min_projector_bound(copies, spin).ok().and_then(|b| b.weight_upper_bound)
    } else {
        None
    };
    let d = match &obj.d {
        Some(d) => d.clone(),
        None => build_d_tensor(&obj.basis)?,
    };

    let mut outcomes: Vec<(usize, RestartOutcome)> = Vec::new();
    let mut start = 0;
    while start < cfg.restarts {
        let end = (start + cfg.batch).min(cfg.restarts);
        let batch: Vec<(usize, RestartOutcome)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = seeded_rng(cfg.seed, i as u64);
                let x0 = obj.initial_point(&mut rng);
                (i, levenberg_marquardt(&obj, x0, cfg, cap))
            })
            .collect();
        let hit = batch.iter().any(|(_, o)| o.residual < cfg.tolerance);
        outcomes.extend(batch);
        start = end;
        if hit && cfg.stop_at_first_feasible {
            break;
        }
    }

    let (_, best) = outcomes
        .iter()
        .min_by(|a, b| a.1.residual.total_cmp(&b.1.residual).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    let povm = obj.to_povm(&best.x)?;
    let samples = if matches!(obj.completeness, Completeness::Probes(_)) { 1000 } else { 0 };
    let verification = verify(&povm, &obj.basis, &d, samples, cfg.seed)?;
    let feasible = best.residual < cfg.tolerance && verification.worst() < 10.0 * cfg.tolerance;
    Ok(SearchResult {
        best: povm,
        best_residual: best.residual,
        feasible,
        restarts_used: outcomes.len(),
        trace: outcomes
            .iter()
            .map(|(i, o)| RestartTrace { restart: *i, residual: o.residual, iterations: o.iterations })
            .collect(),
        verification,
        method: METHOD,
    })
}

/// Label for entries where the search found nothing; not a proof of nonexistence.
pub const NOT_FOUND: &str = "no solution found at tolerance within restart budget";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub best_residual: f64,
    pub feasible: bool,
    pub restarts_used: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    #[serde(rename = "J")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub copies: u32,
    pub rows: Vec<ScanRow>,
    pub smallest_feasible: Option<usize>,
    /// Proven lower bound, when known (`N ≤ 3`).
    pub analytic_bound: Option<u64>,
    /// `J^N`; a conjectured growth rate, never used as a bound.
    pub conjectured_scaling: f64,
}

/// Runs [`search_povm`] for each `n` in `range`.
pub fn scan_min_n(spin: Spin, copies: u32, range: RangeInclusive<usize>, cfg: &SearchConfig) -> Result<ScanTable> {
    if range.is_empty() {
        return Err(Error::InvalidArgument("empty element range".into()));
    }
    let mut rows = Vec::new();
    for n in range {
        let res = search_povm(spin, copies, n, cfg)?;
        rows.push(ScanRow {
            n,
            best_residual: res.best_residual,
            feasible: res.feasible,
            restarts_used: res.restarts_used,
            status: if res.feasible { "feasible".into() } else { NOT_FOUND.into() },
        });
    }
    Ok(ScanTable {
        spin,
        copies,
        smallest_feasible: rows.iter().find(|r| r.feasible).map(|r| r.n),
        rows,
        analytic_bound: min_projector_bound(copies, spin).ok().map(|b| b.n_lower_bound),
        conjectured_scaling: conjectured_scaling(copies, spin),
    })
}
