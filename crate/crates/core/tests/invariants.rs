//! Property tests for the invariants that cut across modules.

use proptest::prelude::*;

use sos_ggm::branches::{p4_phi, p4_solve_asymmetric, period_count, solve, tau_roots};
use sos_ggm::measure::{marginal, FiniteSubtree, Pin};
use sos_ggm::model::{boundary_law_residual, critical_constants};
use sos_ggm::oracle::oracle_solve;
use sos_ggm::{ModelParams, PeriodicLaw};

fn params(k: u32, theta: f64) -> ModelParams {
    ModelParams::new(k, theta).unwrap()
}

/// The largest theta at which every branch for `k` meets the absolute
/// residual tolerance; beyond it the large off-diagonal values sit at ulp
/// level.
fn residual_range(k: u32) -> f64 {
    if k == 2 {
        10.0
    } else {
        critical_constants(k).unwrap().theta_c + 1.5
    }
}

fn law_strategy() -> impl Strategy<Value = PeriodicLaw> {
    prop::collection::vec(0.05f64..20.0, 2..=4).prop_map(|v| PeriodicLaw::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_law_always_solves(k in 2u32..8, theta in 1e-3f64..1e3, q in 2usize..=6) {
        prop_assert_eq!(boundary_law_residual(&PeriodicLaw::ones(q).unwrap(), &params(k, theta)).unwrap(), 0.0);
    }

    #[test]
    fn critical_constants_are_ordered(k in 2u32..=50) {
        let c = critical_constants(k).unwrap();
        prop_assert!(c.theta_0 < c.theta_cr && c.theta_cr < c.theta_c);
    }

    #[test]
    fn every_branch_solves(k in 2u32..=3, t in 0.001f64..1.0, q in 2usize..=4) {
        let p = params(k, t * residual_range(k));
        for b in solve(q, &p).unwrap() {
            prop_assert!(b.law.values().iter().all(|&v| v > 0.0 && v.is_finite()));
            let r = boundary_law_residual(&b.law, &p).unwrap();
            prop_assert!(r < 1e-10, "{} residual {:e}", b.label, r);
        }
    }

    #[test]
    fn every_branch_solves_relative_to_scale(k in 2u32..=6, theta in 0.01f64..20.0, q in 2usize..=4) {
        let p = params(k, theta);
        for b in solve(q, &p).unwrap() {
            let scale = b.law.values().iter().fold(1.0f64, |m, &v| m.max(v));
            let r = boundary_law_residual(&b.law, &p).unwrap() / scale;
            prop_assert!(r < 1e-13, "{} relative residual {:e}", b.label, r);
        }
    }

    #[test]
    fn tau_roots_are_reciprocal(k in 2u32..=5, excess in 1e-3f64..40.0) {
        let c = critical_constants(k).unwrap();
        let roots = tau_roots(&params(k, c.theta_c + excess)).unwrap();
        let v = roots.values();
        prop_assert_eq!(v.len(), 2);
        prop_assert!((v[0] * v[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn period2_ratios_close_under_swap(theta in 0.05f64..10.0) {
        // Class 0 is free for period 2, so swapping (x, y) gives another
        // branch up to scale: the set of ratios y / x is closed under 1 / r.
        let ratios: Vec<f64> = solve(2, &params(2, theta)).unwrap().iter().map(|b| b.y / b.x).collect();
        for r in &ratios {
            prop_assert!(ratios.iter().any(|s| (s * r - 1.0).abs() < 1e-9), "1 / {} missing from {:?}", r, ratios);
        }
    }

    #[test]
    fn period4_swap_and_vieta(theta in 2.01f64..12.0) {
        let p = params(2, theta);
        let (phi1, phi2) = p4_phi(theta);
        for b in p4_solve_asymmetric(&p).unwrap() {
            let swapped = PeriodicLaw::new(vec![1.0, b.y, 1.0, b.x]).unwrap();
            prop_assert!(boundary_law_residual(&swapped, &p).unwrap() < 1e-10);
            let sum = b.x + b.y;
            prop_assert!((sum - phi1).abs() < 1e-10 * phi1 || (sum - phi2).abs() < 1e-10 * phi1.max(1.0));
            prop_assert!((b.x * b.y * theta * theta / 4.0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn count_never_exceeds_distinct_solutions_off_threshold(theta in 0.05f64..12.0, q in 2usize..=4) {
        let c = period_count(q, &params(2, theta)).unwrap();
        prop_assume!(c.threshold.is_none());
        prop_assert!(c.nu <= c.census.raw);
        prop_assert!(c.census.orbit_classes <= c.census.identified);
    }

    #[test]
    fn subtree_shape(k in 1u32..=4, depth in 1usize..=3, half in any::<bool>()) {
        let t = if half { FiniteSubtree::half_tree(k, depth) } else { FiniteSubtree::new(k, depth) };
        let Ok(t) = t else { return Ok(()) };
        prop_assert_eq!(t.edge_count(), t.vertex_count() - 1);
        let mut children = vec![0u32; t.vertex_count()];
        for (p, c) in t.edges() {
            prop_assert!(p < c);
            children[p] += 1;
        }
        for (v, &n) in children.iter().enumerate() {
            let expected = if t.boundary().contains(&v) { 0 } else if v == 0 && !half { k + 1 } else { k };
            prop_assert_eq!(n, expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn marginals_are_normalized(law in law_strategy(), theta in 0.1f64..50.0, depth in 1usize..=2, pin in 0usize..5) {
        let p = params(2, theta);
        let tree = FiniteSubtree::new(2, depth).unwrap();
        let pin = if pin == 4 { Pin::Mixed } else { Pin::Class(pin % law.period()) };
        let m = marginal(&law, &tree, pin, &p).unwrap();
        prop_assert!(m.probs.iter().all(|&x| x >= 0.0));
        prop_assert!((m.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn height_shift_moves_the_pin(law in law_strategy(), theta in 0.1f64..50.0, r in 0i64..4, s in 0usize..4) {
        let p = params(2, theta);
        let tree = FiniteSubtree::new(2, 2).unwrap();
        let q = law.period();
        let s = s % q;
        let shifted = law.shifted(r);
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let a = marginal(&law, &tree, Pin::Mixed, &p).unwrap();
        let b = marginal(&shifted, &tree, Pin::Mixed, &p).unwrap();
        prop_assert!(diff(&a.probs, &b.probs) < 1e-12);
        let moved = (s as i64 + r).rem_euclid(q as i64) as usize;
        let a = marginal(&law, &tree, Pin::Class(moved), &p).unwrap();
        let b = marginal(&shifted, &tree, Pin::Class(s), &p).unwrap();
        prop_assert!(diff(&a.probs, &b.probs) < 1e-12);
    }

    #[test]
    fn palindromic_law_gives_reflection_symmetry(a in 0.05f64..20.0, b in 0.05f64..20.0, theta in 0.1f64..50.0, q in 2usize..=4) {
        // l(i) = l(-i) mod q
        let values = match q {
            2 => vec![a, b],
            3 => vec![a, b, b],
            _ => vec![a, b, 1.0, b],
        };
        let law = PeriodicLaw::new(values).unwrap();
        let tree = FiniteSubtree::new(2, 2).unwrap();
        let m = marginal(&law, &tree, Pin::Class(0), &params(2, theta)).unwrap();
        let n = tree.edge_count();
        for (i, &pr) in m.probs.iter().enumerate() {
            // reflect every base-3 digit d -> 2 - d
            let mut j = 0;
            let mut rest = i;
            let mut place = 1;
            for _ in 0..n {
                j += (2 - rest % 3) * place;
                rest /= 3;
                place *= 3;
            }
            prop_assert!((pr - m.probs[j]).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_solutions_solve_and_stay_bounded(theta in 0.1f64..12.0, q in 2usize..=4) {
        let p = params(2, theta);
        for law in oracle_solve(q, &p).unwrap().found_solutions {
            prop_assert!(boundary_law_residual(&law, &p).unwrap() < 1e-10);
            prop_assert!(law.values().iter().all(|&v| v > 1e-12 && v < 1e12));
        }
    }
}

/// Twenty theta values per period covering every count regime at k = 2,
/// kept away from the critical points where roots are double.
#[test]
fn oracle_agrees_across_regimes() {
    let c = critical_constants(2).unwrap();
    let critical = [
        c.theta_0,
        c.theta_cr,
        c.theta_c,
        c.theta_c3.unwrap(),
        1.0 + 8f64.sqrt(),
    ];
    for q in [2, 3, 4] {
        let mut checked = 0;
        for i in 0..24 {
            let theta = 0.3 + 0.55 * i as f64;
            if critical.iter().any(|t| (t - theta).abs() < 0.05) || checked == 20 {
                continue;
            }
            let p = params(2, theta);
            let laws: Vec<PeriodicLaw> = solve(q, &p).unwrap().into_iter().map(|b| b.law).collect();
            let mut report = oracle_solve(q, &p).unwrap();
            let a = report.compare(&laws);
            assert!(
                a.is_full() && report.found_solutions.len() == laws.len(),
                "q = {q}, theta = {theta}: {a:?}"
            );
            checked += 1;
        }
        assert_eq!(checked, 20);
    }
}
