//! Known optimal POVMs and analytic bounds on their size.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bloch::Spinor;
use crate::error::{Error, Result};
use crate::povm::{weight_sum, Povm};
use crate::spin::Spin;
use crate::sun_algebra::{build_generator_basis, GeneratorBasis};
use crate::C64;

/// Catalog entry names accepted by [`by_name`].
pub const NAMES: [&str; 5] = [
    "von-neumann-j1-n1",
    "von-neumann-j12-n1",
    "tetrahedron-j12-n2",
    "hypertetrahedron-j1-n2",
    "octahedron-j12-n3",
];

pub fn by_name(name: &str) -> Option<Povm> {
    match name {
        "von-neumann-j1-n1" => Some(von_neumann_povm(Spin::ONE)),
        "von-neumann-j12-n1" => Some(von_neumann_povm(Spin::HALF)),
        "tetrahedron-j12-n2" => Some(tetrahedron_j12_n2()),
        "hypertetrahedron-j1-n2" => Some(hypertetrahedron_j1_n2()),
        "octahedron-j12-n3" => Some(octahedron_j12_n3()),
        _ => None,
    }
}

/// Single-copy projective measurement on the computational basis, `n = 2J+1`
/// with unit weights.
pub fn von_neumann_povm(spin: Spin) -> Povm {
    let states = (0..spin.dim()).map(|k| Spinor::basis_state(spin, k).expect("k < D")).collect();
    Povm::uniform(spin, 1, 1.0, states).expect("basis states are normalized")
}

/// Four spin-1/2 states at the vertices of a regular tetrahedron, weights 3/4,
/// for two copies.
pub fn tetrahedron_j12_n2() -> Povm {
    let a = (1.0f64 / 3.0).sqrt();
    let b = (2.0f64 / 3.0).sqrt();
    let mut states = vec![amps(Spin::HALF, &[(1.0, 0.0), (0.0, 0.0)])];
    for k in 0..3 {
        let phase = C64::from_polar(b, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
        states.push(amps(Spin::HALF, &[(a, 0.0), (phase.re, phase.im)]));
    }
    Povm::uniform(Spin::HALF, 2, 0.75, states).expect("tetrahedron is valid")
}

/// Six spin-1/2 states along `±x, ±y, ±z`, weights 2/3, for three copies.
pub fn octahedron_j12_n3() -> Povm {
    let r = 1.0 / 2f64.sqrt();
    let rows: [[(f64, f64); 2]; 6] = [
        [(1.0, 0.0), (0.0, 0.0)],
        [(0.0, 0.0), (1.0, 0.0)],
        [(r, 0.0), (r, 0.0)],
        [(r, 0.0), (-r, 0.0)],
        [(r, 0.0), (0.0, r)],
        [(r, 0.0), (0.0, -r)],
    ];
    let states = rows.iter().map(|r| amps(Spin::HALF, r)).collect();
    Povm::uniform(Spin::HALF, 3, 2.0 / 3.0, states).expect("octahedron is valid")
}

/// The nine spin-1 states of the two-copy hypertetrahedron, equal weights 2/3.
///
/// All pairwise overlaps have modulus 1/2 and all pairwise Bloch dot products
/// equal −1/8. The weights follow from `Σ c² = 6` over nine equivalent
/// elements, saturating `c² ≤ (J+1)/(2J+1)`.
pub fn hypertetrahedron_j1_n2() -> Povm {
    let h = 0.5;
    let r2 = 1.0 / 2f64.sqrt();
    let s3 = 3f64.sqrt() / 2.0;
    let re3 = -1.0 / (2.0 * 2f64.sqrt());
    let im3 = 3f64.sqrt() / (2.0 * 2f64.sqrt());
    let rows: [[(f64, f64); 3]; 9] = [
        [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
        [(h, 0.0), (s3, 0.0), (0.0, 0.0)],
        [(h, 0.0), (-s3, 0.0), (0.0, 0.0)],
        [(h, 0.0), (0.0, h), (r2, 0.0)],
        [(h, 0.0), (0.0, h), (re3, im3)],
        [(h, 0.0), (0.0, h), (re3, -im3)],
        [(h, 0.0), (0.0, -h), (r2, 0.0)],
        [(h, 0.0), (0.0, -h), (re3, im3)],
        [(h, 0.0), (0.0, -h), (re3, -im3)],
    ];
    let states = rows.iter().map(|r| amps(Spin::ONE, r)).collect();
    Povm::uniform(Spin::ONE, 2, 2.0 / 3.0, states).expect("hypertetrahedron is valid")
}

/// Generator frame in which [`hypertetrahedron_bloch`] is written: the
/// Gell-Mann matrices relabeled as `(λ8, λ3, λ1, λ6, λ4, λ2, λ7, −λ5)`
/// (zero-based indices, sign).
pub const HYPERTETRAHEDRON_FRAME: [(usize, f64); 8] =
    [(7, 1.0), (2, 1.0), (0, 1.0), (5, 1.0), (3, 1.0), (1, 1.0), (6, 1.0), (4, -1.0)];

/// SU(3) basis in the [`HYPERTETRAHEDRON_FRAME`] labelling.
pub fn hypertetrahedron_frame_basis() -> GeneratorBasis {
    build_generator_basis(Spin::ONE)
        .and_then(|b| b.relabeled(&HYPERTETRAHEDRON_FRAME))
        .expect("frame is a signed permutation")
}

/// Reference Bloch vectors of the nine hypertetrahedron elements, in the
/// [`HYPERTETRAHEDRON_FRAME`] generator labelling.
pub fn hypertetrahedron_bloch() -> [[f64; 8]; 9] {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    [
        [0.5, s3 / 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.5, -s3 / 4.0, 0.75, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.5, -s3 / 4.0, -0.75, 0.0, 0.0, 0.0, 0.0, 0.0],
        [-0.25, 0.0, 0.0, 0.0, s6 / 4.0, s3 / 4.0, -s6 / 4.0, 0.0],
        [-0.25, 0.0, 0.0, 3.0 * s2 / 8.0, -s6 / 8.0, s3 / 4.0, s6 / 8.0, -3.0 * s2 / 8.0],
        [-0.25, 0.0, 0.0, -3.0 * s2 / 8.0, -s6 / 8.0, s3 / 4.0, s6 / 8.0, 3.0 * s2 / 8.0],
        [-0.25, 0.0, 0.0, 0.0, s6 / 4.0, -s3 / 4.0, s6 / 4.0, 0.0],
        [-0.25, 0.0, 0.0, -3.0 * s2 / 8.0, -s6 / 8.0, -s3 / 4.0, -s6 / 8.0, -3.0 * s2 / 8.0],
        [-0.25, 0.0, 0.0, 3.0 * s2 / 8.0, -s6 / 8.0, -s3 / 4.0, -s6 / 8.0, 3.0 * s2 / 8.0],
    ]
}

fn amps(spin: Spin, parts: &[(f64, f64)]) -> Spinor {
    Spinor::new(spin, parts.iter().map(|&(re, im)| C64::new(re, im)).collect())
        .expect("catalog literal is normalized")
}

/// Whether a lower bound on `n` can be attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Saturability {
    Yes,
    NoByParity,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "N")]
    pub copies: u32,
    #[serde(rename = "J")]
    pub spin: Spin,
    pub n_lower_bound: u64,
    pub weight_upper_bound: Option<f64>,
    pub weight_sum: f64,
    pub saturable: Saturability,
    /// `p` and `q` of the three-copy counting argument, as strings like `"9/2"`.
    pub parity_p: Option<String>,
    pub parity_q: Option<String>,
    /// Whether the counting argument allows saturation (`N = 3` only).
    pub parity_permits: Option<bool>,
    pub note: String,
}

/// Lower bound on the number of elements of an optimal POVM, with the
/// matching per-element weight cap, for `N = 1, 2, 3`.
pub fn min_projector_bound(copies: u32, spin: Spin) -> Result<BoundReport> {
    let d = spin.dim() as u64;
    let t = spin.twice() as f64;
    let j = spin.value();
    let w = weight_sum(copies, spin);
    let (bound, cap, saturable, parity, note) = match copies {
        1 => (d, 1.0, Saturability::Yes, None, "saturated by a von Neumann measurement".to_string()),
        2 => {
            let sat = if spin.twice() <= 2 { Saturability::Yes } else { Saturability::Unknown };
            let note = if spin.twice() <= 2 {
                "saturated by the (hyper)tetrahedron".to_string()
            } else {
                "saturability beyond J = 1 is unknown".to_string()
            };
            (d * d, (j + 1.0) / (t + 1.0), sat, None, note)
        }
        3 => {
            let (p, q, ok) = n3_parity_obstruction(spin);
            let sat = match (ok, spin.twice()) {
                (true, 1) => Saturability::Yes,
                (true, _) => Saturability::Unknown,
                (false, _) => Saturability::NoByParity,
            };
            let note = if spin.twice() == 1 {
                "saturated by the octahedron".to_string()
            } else if ok {
                "no parity obstruction; saturability not established".to_string()
            } else {
                "odd integer spin: saturation would need non-integer p, q".to_string()
            };
            // (J+1)(2J+1)² = (2J+2)(2J+1)²/2
            let bound = (spin.twice() as u64 + 2) * d * d / 2;
            (bound, (t + 3.0) / (3.0 * (t + 1.0)), sat, Some((p, q)), note)
        }
        n => return Err(Error::UnsupportedCopies(n)),
    };
    Ok(BoundReport {
        copies,
        spin,
        n_lower_bound: bound,
        weight_upper_bound: Some(cap),
        weight_sum: w,
        saturable,
        parity_p: parity.map(|(p, _)| p.to_string()),
        parity_q: parity.map(|(_, q)| q.to_string()),
        parity_permits: parity.map(|(p, q)| p.is_integer() && q.is_integer()),
        note,
    })
}

/// Multiplicities `p = J(2J+1)²/2`, `q = J(2J+3)²/2` of the two scalar
/// products an element of a saturating three-copy POVM would have with the
/// others; saturation is possible only if both are integers.
pub fn n3_parity_obstruction(spin: Spin) -> (Ratio<u64>, Ratio<u64>, bool) {
    let t = spin.twice() as u64;
    let p = Ratio::new(t * (t + 1) * (t + 1), 4);
    let q = Ratio::new(t * (t + 3) * (t + 3), 4);
    // each element pairs with the other n − 1 = (J+1)(2J+1)² − 1 elements
    debug_assert_eq!(p + q, Ratio::from_integer((t + 2) * (t + 1) * (t + 1) / 2 - 1));
    (p, q, p.is_integer() && q.is_integer())
}

/// `J^N`, the conjectured growth of the minimal element count. Informational only.
pub fn conjectured_scaling(copies: u32, spin: Spin) -> f64 {
    spin.value().powi(copies as i32)
}

/// Minimal element counts for spin 1/2 and `N = 1 … 5` reported in the literature.
pub const SPIN_HALF_KNOWN_MINIMA: [(u32, u64); 5] = [(1, 2), (2, 4), (3, 6), (4, 10), (5, 12)];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{purity_residual_max, spinor_to_bloch, min_pure_dot};
    use crate::povm::{completeness_residual, moment_residuals};
    use crate::sun_algebra::build_d_tensor;
    use crate::tol;

    fn spin(tw: u32) -> Spin {
        Spin::from_twice(tw).unwrap()
    }

    #[test]
    fn von_neumann_structure() {
        for tw in 1..=7 {
            let s = spin(tw);
            let p = von_neumann_povm(s);
            assert_eq!(p.len(), s.dim());
            assert!(p.weights().iter().all(|&w| w == 1.0));
            let b = build_generator_basis(s).unwrap();
            let ns = p.blochs(&b).unwrap();
            for r in 0..ns.len() {
                for q in r + 1..ns.len() {
                    assert!((ns[r].dot(&ns[q]) - min_pure_dot(s)).abs() < 1e-12);
                }
            }
            if tw <= 4 {
                let d = build_d_tensor(&b).unwrap();
                assert!(moment_residuals(&p, &b, &d).unwrap().worst() < 1e-12);
                assert!(completeness_residual(&p).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn von_neumann_j1_bloch_vectors() {
        let b = build_generator_basis(Spin::ONE).unwrap();
        let ns = von_neumann_povm(Spin::ONE).blochs(&b).unwrap();
        let s3 = 3f64.sqrt() / 2.0;
        let want = [
            [0.0, 0.0, s3, 0.0, 0.0, 0.0, 0.0, 0.5],
            [0.0, 0.0, -s3, 0.0, 0.0, 0.0, 0.0, 0.5],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        ];
        for (n, w) in ns.iter().zip(want) {
            for (x, y) in n.components().iter().zip(w) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn spin_half_von_neumann_is_antipodal() {
        let b = build_generator_basis(Spin::HALF).unwrap();
        let ns = von_neumann_povm(Spin::HALF).blochs(&b).unwrap();
        assert!((ns[0].dot(&ns[1]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_structure() {
        let p = tetrahedron_j12_n2();
        assert!((p.total_weight() - 3.0).abs() < 1e-15);
        let b = build_generator_basis(Spin::HALF).unwrap();
        let ns = p.blochs(&b).unwrap();
        for r in 0..4 {
            for q in r + 1..4 {
                assert!((ns[r].dot(&ns[q]) + 1.0 / 3.0).abs() < 1e-12);
            }
        }
        let cap = min_projector_bound(2, Spin::HALF).unwrap().weight_upper_bound.unwrap();
        assert!((cap - 0.75).abs() < 1e-15);
        assert!(p.weights().iter().all(|&w| (w - cap).abs() < 1e-15));
        let d = build_d_tensor(&b).unwrap();
        assert!(moment_residuals(&p, &b, &d).unwrap().worst() < tol::DERIVED);
    }

    #[test]
    fn hypertetrahedron_pairwise_structure() {
        let p = hypertetrahedron_j1_n2();
        let b = build_generator_basis(Spin::ONE).unwrap();
        let ns = p.blochs(&b).unwrap();
        for r in 0..9 {
            for q in r + 1..9 {
                assert!((ns[r].dot(&ns[q]) + 0.125).abs() < 1e-12);
                let ov = p.elements()[r].state.inner(&p.elements()[q].state).norm();
                assert!((ov - 0.5).abs() < 1e-12);
            }
        }
        let cap = min_projector_bound(2, Spin::ONE).unwrap().weight_upper_bound.unwrap();
        assert!((2.0 / 3.0 - cap).abs() < 1e-15);
    }

    #[test]
    fn hypertetrahedron_reference_table_in_frame() {
        let frame = hypertetrahedron_frame_basis();
        let ns = hypertetrahedron_j1_n2().blochs(&frame).unwrap();
        for (n, want) in ns.iter().zip(hypertetrahedron_bloch()) {
            for (x, y) in n.components().iter().zip(want) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        // the reference vectors are pure with respect to the frame's own d tensor
        let d = build_d_tensor(&frame).unwrap();
        for row in hypertetrahedron_bloch() {
            let n = crate::bloch::BlochVector::new(Spin::ONE, row.to_vec()).unwrap();
            assert!(purity_residual_max(&n, &d).unwrap() < tol::DERIVED);
        }
        // in Gell-Mann order Ψ_1 = e_1 sits at (0,0,√3/2,0,0,0,0,1/2) instead
        let gm = build_generator_basis(Spin::ONE).unwrap();
        let n1 = spinor_to_bloch(&hypertetrahedron_j1_n2().elements()[0].state, &gm).unwrap();
        assert!((n1.components()[2] - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn weights_solve_the_moment_system() {
        // with states fixed, the order 0..2 equations are linear in the nine weights;
        // least squares recovers 2/3 for every element
        use nalgebra::{DMatrix, DVector};
        let p = hypertetrahedron_j1_n2();
        let b = build_generator_basis(Spin::ONE).unwrap();
        let ns = p.blochs(&b).unwrap();
        let mut rows: Vec<Vec<f64>> = vec![vec![1.0; 9]];
        let mut rhs = vec![6.0];
        for a in 0..8 {
            rows.push(ns.iter().map(|n| n.components()[a]).collect());
            rhs.push(0.0);
        }
        for a in 0..8 {
            for c in a..8 {
                rows.push(ns.iter().map(|n| n.components()[a] * n.components()[c]).collect());
                rhs.push(if a == c { 6.0 / 8.0 } else { 0.0 });
            }
        }
        let m = DMatrix::from_fn(rows.len(), 9, |i, j| rows[i][j]);
        let y = DVector::from_vec(rhs);
        let sol = m.clone().svd(true, true).solve(&y, 1e-14).unwrap();
        let resid = (&m * &sol - &y).amax();
        assert!(resid < 1e-12);
        for w in sol.iter() {
            assert!((w - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bounds_for_three_copies() {
        let n: Vec<u64> =
            [1, 2, 3].iter().map(|&tw| min_projector_bound(3, spin(tw)).unwrap().n_lower_bound).collect();
        assert_eq!(n, vec![6, 18, 40]);
        let r = min_projector_bound(3, Spin::ONE).unwrap();
        assert_eq!(r.saturable, Saturability::NoByParity);
        assert_eq!(r.parity_p.as_deref(), Some("9/2"));
        assert_eq!(r.parity_permits, Some(false));
        let half = min_projector_bound(3, Spin::HALF).unwrap();
        assert_eq!(half.saturable, Saturability::Yes);
        assert_eq!(half.parity_permits, Some(true));
        let two = min_projector_bound(3, spin(4)).unwrap();
        assert_eq!((two.saturable, two.parity_permits), (Saturability::Unknown, Some(true)));
        assert_eq!(min_projector_bound(2, Spin::ONE).unwrap().parity_permits, None);
    }

    #[test]
    fn bounds_for_one_and_two_copies() {
        for tw in 1..=7 {
            let s = spin(tw);
            let d = s.dim() as u64;
            let one = min_projector_bound(1, s).unwrap();
            assert_eq!(one.n_lower_bound, d);
            assert_eq!(one.weight_upper_bound, Some(1.0));
            assert_eq!(one.saturable, Saturability::Yes);
            let two = min_projector_bound(2, s).unwrap();
            assert_eq!(two.n_lower_bound, d * d);
        }
        assert_eq!(min_projector_bound(2, spin(3)).unwrap().saturable, Saturability::Unknown);
        assert_eq!(min_projector_bound(4, Spin::ONE), Err(Error::UnsupportedCopies(4)));
    }

    #[test]
    fn bound_consistency() {
        for copies in 1..=3 {
            for tw in 1..=9 {
                let r = min_projector_bound(copies, spin(tw)).unwrap();
                let ratio = r.weight_sum / r.weight_upper_bound.unwrap();
                assert!(r.n_lower_bound as f64 >= ratio - 1e-9, "N={copies} 2J={tw}");
            }
        }
    }

    #[test]
    fn parity_values() {
        let (p, q, ok) = n3_parity_obstruction(Spin::ONE);
        assert_eq!(p, Ratio::new(9, 2));
        assert_eq!(q, Ratio::new(25, 2));
        assert!(!ok);
        let (p, q, ok) = n3_parity_obstruction(Spin::HALF);
        assert_eq!((p, q, ok), (Ratio::from_integer(1), Ratio::from_integer(4), true));
        let (p, q, ok) = n3_parity_obstruction(spin(4));
        assert_eq!((p, q, ok), (Ratio::from_integer(25), Ratio::from_integer(49), true));
        for tw in 1..40u32 {
            let (p, q, ok) = n3_parity_obstruction(spin(tw));
            let n = min_projector_bound(3, spin(tw)).unwrap().n_lower_bound;
            assert_eq!(p + q, Ratio::from_integer(n - 1));
            // obstruction exactly for odd integer spin
            assert_eq!(!ok, tw % 4 == 2, "2J={tw}");
        }
    }

    #[test]
    fn conjecture_values() {
        assert_eq!(conjectured_scaling(1, Spin::ONE), 1.0);
        assert_eq!(conjectured_scaling(2, Spin::ONE), 1.0);
        assert_eq!(conjectured_scaling(3, spin(6)), 27.0);
    }

    #[test]
    fn catalog_names_resolve() {
        for name in NAMES {
            assert!(by_name(name).is_some(), "{name}");
        }
        assert!(by_name("cube").is_none());
    }

    #[test]
    fn octahedron_saturates_three_copy_bound() {
        let p = octahedron_j12_n3();
        let bound = min_projector_bound(3, Spin::HALF).unwrap();
        assert_eq!(p.len() as u64, bound.n_lower_bound);
        assert!(p.weights().iter().all(|&w| (w - bound.weight_upper_bound.unwrap()).abs() < 1e-15));
        let basis = build_generator_basis(Spin::HALF).unwrap();
        let d = crate::sun_algebra::build_d_tensor(&basis).unwrap();
        let report = crate::povm::verify(&p, &basis, &d, 0, 0).unwrap();
        assert!(report.worst() < 1e-12, "{report:?}");
        assert!(report.order3_residual.is_some());
    }
}
