//! Uniform sampling of pure states and Monte Carlo estimates built on it.
//!
//! All randomness comes from ChaCha20 ([`RNG_ALGORITHM`]). Worker `k` of a
//! parallel run draws from stream `k` of the master seed, so results are
//! reproducible for a fixed `(seed, workers)` pair.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::bloch::Spinor;
use crate::error::{Error, Result};
use crate::povm::{analytic_fidelity, resolution_residual, Povm};
use crate::spin::Spin;
use crate::tol;
use crate::C64;

/// Name recorded in run manifests.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha), stream = worker index";

/// Minimum sample count accepted by [`estimate_average_fidelity`].
pub const MIN_FIDELITY_SAMPLES: usize = 1000;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a state from the unitarily invariant measure: `2D` independent
/// standard normals as `(x_i, y_i)`, then normalized.
pub fn sample_pure_state<R: Rng + ?Sized>(spin: Spin, rng: &mut R) -> Spinor {
    loop {
        let amps: Vec<C64> = (0..spin.dim())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = Spinor::normalized(spin, amps) {
            return s;
        }
    }
}

/// Haar-random `d x d` unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal divided out).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let p = r[(j, j)];
        let phase = if p.norm() > 0.0 { p / p.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Total volume of the pure-state space of dimension `D`, numerically and in
/// closed form.
///
/// The numeric value integrates `4 sin^{2D−3}φ cos φ` over `φ ∈ [0, π/2]` with
/// composite Simpson on `points` intervals and multiplies by the area of the
/// unit sphere `S_{2D−3}`. The closed form is `4π^{D−1}/(D−1)!`.
pub fn volume_check(dim: usize, points: usize) -> Result<(f64, f64)> {
    if !(2..=6).contains(&dim) {
        return Err(Error::InvalidArgument(format!("volume check needs 2 <= D <= 6, got {dim}")));
    }
    let n = points.max(2).next_multiple_of(2);
    let p = 2 * dim as i32 - 3;
    let f = |phi: f64| 4.0 * phi.sin().powi(p) * phi.cos();
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let mut acc = f(0.0) + f(std::f64::consts::FRAC_PI_2);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    let radial = acc * h / 3.0;
    // unit S^k in R^{k+1} has area 2π^{(k+1)/2}/Γ((k+1)/2); here k = 2D−3
    let half = (dim - 1) as f64;
    let sphere = 2.0 * std::f64::consts::PI.powf(half) / gamma(half);
    let factorial: f64 = (1..dim).map(|i| i as f64).product();
    let analytic = 4.0 * std::f64::consts::PI.powi(dim as i32 - 1) / factorial;
    Ok((radial * sphere, analytic))
}

/// Streaming mean/variance (Welford), mergeable across workers.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation.
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).sqrt()
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.std_dev() / (self.count as f64).sqrt()
        }
    }
}

/// Splits `total` into `workers` contiguous blocks.
fn block_sizes(total: usize, workers: usize) -> Vec<usize> {
    let w = workers.max(1);
    (0..w).map(|k| total / w + usize::from(k < total % w)).collect()
}

/// Runs `body(rng, count)` on each worker's stream and merges in worker order.
fn parallel_stats<F>(total: usize, seed: u64, workers: usize, body: F) -> RunningStats
where
    F: Fn(&mut ChaCha20Rng, usize) -> RunningStats + Sync,
{
    let parts: Vec<RunningStats> = block_sizes(total, workers)
        .into_par_iter()
        .enumerate()
        .map(|(k, count)| body(&mut seeded_rng(seed, k as u64), count))
        .collect();
    let mut all = RunningStats::default();
    for p in &parts {
        all.merge(p);
    }
    all
}

/// Monte Carlo average fidelity, with the closed-form optimum alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub analytic: f64,
}

impl FidelityEstimate {
    /// `|mean − analytic|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.analytic).abs() / self.stderr
    }
}

/// Averages `Σ_r c_r² |⟨ψ|Ψ_r⟩|^{2N} |⟨ψ|Ψ_r⟩|²` over uniformly random `ψ`.
///
/// The POVM must resolve the identity on the symmetric subspace to within
/// [`tol::VALID_POVM`]; otherwise [`Error::CompletenessFailed`] is returned.
pub fn estimate_average_fidelity(
    povm: &Povm,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<FidelityEstimate> {
    if samples < MIN_FIDELITY_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_FIDELITY_SAMPLES} samples required, got {samples}"
        )));
    }
    let residual = resolution_residual(povm)?;
    if !(residual < tol::VALID_POVM) {
        return Err(Error::CompletenessFailed(residual));
    }
    let copies = povm.copies() as i32;
    let stats = parallel_stats(samples, seed, workers, |rng, count| {
        let mut s = RunningStats::default();
        for _ in 0..count {
            let psi = sample_pure_state(povm.spin(), rng);
            let f: f64 = povm
                .elements()
                .iter()
                .map(|e| {
                    let o = psi.overlap(&e.state);
                    e.weight * o.powi(copies) * o
                })
                .sum();
            s.push(f);
        }
        s
    });
    Ok(FidelityEstimate {
        mean: stats.mean(),
        stderr: stats.stderr(),
        samples,
        analytic: analytic_fidelity(povm.copies(), povm.spin()),
    })
}

/// Outcome probabilities `c_r² |⟨ψ|Ψ_r⟩|^{2N}` for `N` copies of `ψ`.
pub fn outcome_probabilities(povm: &Povm, psi: &Spinor) -> Result<Vec<f64>> {
    if psi.spin() != povm.spin() {
        return Err(Error::SpinMismatch(povm.spin().to_string(), psi.spin().to_string()));
    }
    psi.check_normalized()?;
    let copies = povm.copies() as i32;
    Ok(povm.elements().iter().map(|e| e.weight * psi.overlap(&e.state).powi(copies)).collect())
}

/// Samples one measurement outcome on `N` copies of `ψ`.
pub fn simulate_measurement<R: Rng + ?Sized>(povm: &Povm, psi: &Spinor, rng: &mut R) -> Result<usize> {
    let probs = outcome_probabilities(povm, psi)?;
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol::PROBABILITY_SUM {
        return Err(Error::ProbabilitySum(total));
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (r, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok(r);
        }
    }
    Ok(probs.iter().rposition(|&p| p > 0.0).unwrap_or(0))
}

/// Outcome histogram and empirical fidelity of the guess-the-outcome strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub trials: usize,
    pub histogram: Vec<u64>,
    pub fidelity_mean: f64,
    pub fidelity_stderr: f64,
    pub analytic: f64,
}

/// Repeats: draw a uniform `ψ`, measure `N` copies, guess `Ψ_r`, score `|⟨ψ|Ψ_r⟩|²`.
pub fn simulate(povm: &Povm, trials: usize, seed: u64, workers: usize) -> Result<SimulationSummary> {
    let residual = resolution_residual(povm)?;
    if !(residual < tol::VALID_POVM) {
        return Err(Error::CompletenessFailed(residual));
    }
    let n = povm.len();
    let parts: Vec<Result<(RunningStats, Vec<u64>)>> = block_sizes(trials, workers)
        .into_par_iter()
        .enumerate()
        .map(|(k, count)| {
            let mut rng = seeded_rng(seed, k as u64);
            let mut stats = RunningStats::default();
            let mut hist = vec![0u64; n];
            for _ in 0..count {
                let psi = sample_pure_state(povm.spin(), &mut rng);
                let r = simulate_measurement(povm, &psi, &mut rng)?;
                hist[r] += 1;
                stats.push(psi.overlap(&povm.elements()[r].state));
            }
            Ok((stats, hist))
        })
        .collect();
    let mut stats = RunningStats::default();
    let mut histogram = vec![0u64; n];
    for part in parts {
        let (s, h) = part?;
        stats.merge(&s);
        histogram.iter_mut().zip(h).for_each(|(a, b)| *a += b);
    }
    Ok(SimulationSummary {
        trials,
        histogram,
        fidelity_mean: stats.mean(),
        fidelity_stderr: stats.stderr(),
        analytic: analytic_fidelity(povm.copies(), povm.spin()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::spinor_to_bloch;
    use crate::catalog::{hypertetrahedron_j1_n2, von_neumann_povm};
    use crate::sun_algebra::build_generator_basis;

    fn stats_of(values: impl Iterator<Item = f64>) -> RunningStats {
        let mut s = RunningStats::default();
        values.for_each(|v| s.push(v));
        s
    }

    #[test]
    fn running_stats_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let whole = stats_of(xs.iter().copied());
        let mut a = stats_of(xs[..313].iter().copied());
        a.merge(&stats_of(xs[313..].iter().copied()));
        assert_eq!(a.count(), 1000);
        assert!((a.mean() - whole.mean()).abs() < 1e-12);
        assert!((a.std_dev() - whole.std_dev()).abs() < 1e-12);
    }

    #[test]
    fn spin_half_z_mean_is_zero() {
        let b = build_generator_basis(Spin::HALF).unwrap();
        let mut rng = seeded_rng(100, 0);
        let s = stats_of(
            (0..100_000).map(|_| spinor_to_bloch(&sample_pure_state(Spin::HALF, &mut rng), &b).unwrap().components()[2]),
        );
        assert!(s.mean().abs() < 3.0 * s.stderr());
    }

    #[test]
    fn spin_one_first_amplitude_moments() {
        let mut rng = seeded_rng(101, 0);
        let draws: Vec<f64> =
            (0..100_000).map(|_| sample_pure_state(Spin::ONE, &mut rng).amplitudes()[0].norm_sqr()).collect();
        let second = stats_of(draws.iter().copied());
        assert!((second.mean() - 1.0 / 3.0).abs() < 3.0 * second.stderr());

        // oracle for E|ψ_1|⁴: ∫cos⁴φ sin³φ cosφ dφ / ∫sin³φ cosφ dφ by Simpson quadrature
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let n = 20_000;
            let h = std::f64::consts::FRAC_PI_2 / n as f64;
            let mut acc = f(0.0) + f(std::f64::consts::FRAC_PI_2);
            for i in 1..n {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
            }
            acc * h / 3.0
        };
        let oracle = simpson(&|p: f64| p.cos().powi(5) * p.sin().powi(3))
            / simpson(&|p: f64| p.cos() * p.sin().powi(3));
        assert!((oracle - 1.0 / 6.0).abs() < 1e-12);
        let fourth = stats_of(draws.iter().map(|x| x * x));
        assert!((fourth.mean() - oracle).abs() < 3.0 * fourth.stderr());
    }

    #[test]
    fn volumes() {
        let pi = std::f64::consts::PI;
        for (d, want) in [(2, 4.0 * pi), (3, 2.0 * pi * pi), (4, 2.0 / 3.0 * pi.powi(3))] {
            let (num, ana) = volume_check(d, 2000).unwrap();
            assert!((ana - want).abs() < 1e-12 * want);
            assert!(((num - ana) / ana).abs() < 1e-6);
        }
        assert!(volume_check(7, 100).is_err());
        assert!(volume_check(1, 100).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(3, 3);
        let u = random_unitary(4, &mut rng);
        let gap = (&u.adjoint() * &u - DMatrix::<C64>::identity(4, 4)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(gap < 1e-12);
    }

    #[test]
    fn fidelity_estimates() {
        let v = estimate_average_fidelity(&von_neumann_povm(Spin::ONE), 200_000, 7, 4).unwrap();
        assert!(v.z_score() < 3.0, "{v:?}");
        assert!((v.analytic - 0.5).abs() < 1e-15);
        let h = estimate_average_fidelity(&hypertetrahedron_j1_n2(), 200_000, 7, 4).unwrap();
        assert!(h.z_score() < 3.0, "{h:?}");
        assert!(0.0 <= h.mean && h.mean <= 1.0);
    }

    #[test]
    fn fidelity_is_seed_deterministic() {
        let p = hypertetrahedron_j1_n2();
        let a = estimate_average_fidelity(&p, 5000, 42, 3).unwrap();
        let b = estimate_average_fidelity(&p, 5000, 42, 3).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        let c = estimate_average_fidelity(&p, 5000, 43, 3).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn fidelity_rejects_invalid() {
        let p = hypertetrahedron_j1_n2().map_weights(|i, w| if i == 0 { 1.5 * w } else { w }).unwrap();
        assert!(matches!(estimate_average_fidelity(&p, 5000, 1, 1), Err(Error::CompletenessFailed(_))));
        assert!(matches!(
            estimate_average_fidelity(&hypertetrahedron_j1_n2(), 10, 1, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn von_neumann_outcome_is_certain() {
        let p = von_neumann_povm(Spin::ONE);
        let mut rng = seeded_rng(0, 0);
        for k in 0..3 {
            let psi = Spinor::basis_state(Spin::ONE, k).unwrap();
            for _ in 0..20 {
                assert_eq!(simulate_measurement(&p, &psi, &mut rng).unwrap(), k);
            }
        }
    }

    #[test]
    fn hypertetrahedron_outcome_probabilities() {
        let p = hypertetrahedron_j1_n2();
        let psi = p.elements()[0].state.clone();
        let probs = outcome_probabilities(&p, &psi).unwrap();
        assert!((probs[0] - 2.0 / 3.0).abs() < 1e-12);
        for &q in &probs[1..] {
            assert!((q - 1.0 / 24.0).abs() < 1e-12);
        }
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn invalid_povm_probabilities_rejected() {
        let p = von_neumann_povm(Spin::ONE).without(2).unwrap();
        let psi = Spinor::basis_state(Spin::ONE, 2).unwrap();
        let mut rng = seeded_rng(0, 0);
        assert!(matches!(simulate_measurement(&p, &psi, &mut rng), Err(Error::ProbabilitySum(_))));
    }

    #[test]
    fn simulated_fidelity_agrees_with_estimator() {
        let p = hypertetrahedron_j1_n2();
        let sim = simulate(&p, 200_000, 11, 4).unwrap();
        let est = estimate_average_fidelity(&p, 200_000, 12, 4).unwrap();
        let combined = (sim.fidelity_stderr.powi(2) + est.stderr.powi(2)).sqrt();
        assert!((sim.fidelity_mean - est.mean).abs() < 3.0 * combined);
        assert_eq!(sim.histogram.iter().sum::<u64>(), 200_000);
    }

    #[test]
    fn unitary_invariance_of_moments() {
        // rotating every sample by a fixed unitary leaves the estimated moment unchanged
        let mut rng = seeded_rng(77, 0);
        let u = random_unitary(3, &mut rng);
        let target = hypertetrahedron_j1_n2().elements()[3].state.clone();
        let mut plain = RunningStats::default();
        let mut rotated = RunningStats::default();
        for _ in 0..100_000 {
            let psi = sample_pure_state(Spin::ONE, &mut rng);
            plain.push(psi.overlap(&target).powi(3));
            let psi2 = sample_pure_state(Spin::ONE, &mut rng).transformed(&u);
            rotated.push(psi2.overlap(&target).powi(3));
        }
        let combined = (plain.stderr().powi(2) + rotated.stderr().powi(2)).sqrt();
        assert!((plain.mean() - rotated.mean()).abs() < 3.0 * combined);
        // exact value: E|⟨e|ψ⟩|⁶ = 3!·2!/5! = 1/10
        assert!((plain.mean() - 0.1).abs() < 3.0 * plain.stderr());
    }
}
