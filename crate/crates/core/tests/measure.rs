//! Gradient marginals against direct enumeration over heights.

use sos_ggm::branches::{solve, CaseTag};
use sos_ggm::measure::{
    edge_gradient_distribution, marginal, mixed_marginal, pinned_marginal, FiniteSubtree, Pin,
};
use sos_ggm::{ModelParams, PeriodicLaw};

/// Unnormalized weight of each gradient configuration, written out from the
/// definition: bond weights `theta` for equal heights and 1 for unit steps,
/// times the boundary law at each leaf height, summed over the root classes
/// in `classes`.
fn brute_force(law: &PeriodicLaw, tree: &FiniteSubtree, theta: f64, classes: &[i64]) -> Vec<f64> {
    let edges = tree.edges();
    let leaves = tree.boundary();
    let n = edges.len();
    let total = 3usize.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        // edge 0 is the most significant base-3 digit
        let zeta: Vec<i64> = (0..n)
            .map(|e| (idx / 3usize.pow((n - 1 - e) as u32)) as i64 % 3 - 1)
            .collect();
        let mut w = 1.0;
        for &z in &zeta {
            if z == 0 {
                w *= theta;
            }
        }
        let mut s_sum = 0.0;
        for &s in classes {
            let mut h = vec![None; n + 1];
            h[0] = Some(s);
            // edges are listed parent-first, so one pass fixes every height
            for (e, &(p, c)) in edges.iter().enumerate() {
                h[c] = Some(h[p].unwrap() + zeta[e]);
            }
            s_sum += leaves
                .iter()
                .map(|&y| law.value(h[y].unwrap()))
                .product::<f64>();
        }
        out.push(w * s_sum);
    }
    let z: f64 = out.iter().sum();
    out.iter().map(|w| w / z).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn depth_one_matches_27_configurations() {
    let p = ModelParams::new(2, 7.0).unwrap();
    let tree = FiniteSubtree::new(2, 1).unwrap();
    assert_eq!(tree.edge_count(), 3);
    for b in solve(2, &p).unwrap() {
        let mixed = mixed_marginal(&b.law, &tree, &p).unwrap();
        assert_eq!(mixed.probs.len(), 27);
        assert!(
            max_diff(&mixed.probs, &brute_force(&b.law, &tree, 7.0, &[0, 1])) < 1e-14,
            "{}",
            b.label
        );
        for s in 0..2 {
            let pinned = pinned_marginal(&b.law, &tree, s, &p).unwrap();
            assert!(max_diff(&pinned.probs, &brute_force(&b.law, &tree, 7.0, &[s as i64])) < 1e-14);
        }
    }
}

#[test]
fn depth_two_matches_enumeration_for_every_period() {
    for (q, theta) in [(2, 7.0), (3, 10.0), (4, 8.0)] {
        let p = ModelParams::new(2, theta).unwrap();
        let tree = FiniteSubtree::new(2, 2).unwrap();
        let classes: Vec<i64> = (0..q as i64).collect();
        for b in solve(q, &p).unwrap() {
            let m = mixed_marginal(&b.law, &tree, &p).unwrap();
            let d = max_diff(&m.probs, &brute_force(&b.law, &tree, theta, &classes));
            assert!(d < 1e-12, "q = {q}, {}: {d:e}", b.label);
        }
    }
}

#[test]
fn single_edge_distribution_from_the_law() {
    // For one edge of the full depth-1 tree, P(zeta) follows from summing the
    // other two edges out by hand.
    let p = ModelParams::new(2, 7.0).unwrap();
    let tree = FiniteSubtree::new(2, 1).unwrap();
    let law = PeriodicLaw::new(vec![1.0, 4.0]).unwrap();
    let m = mixed_marginal(&law, &tree, &p).unwrap();
    let d = edge_gradient_distribution(&m);
    let side = |s: i64| 7.0 * law.value(s) + law.value(s - 1) + law.value(s + 1);
    let mut w = [0.0; 3];
    for s in 0..2 {
        for (j, z) in (-1i64..=1).enumerate() {
            let bond = if z == 0 { 7.0 } else { 1.0 };
            w[j] += bond * law.value(s + z) * side(s).powi(2);
        }
    }
    let total: f64 = w.iter().sum();
    for edge in &d {
        for j in 0..3 {
            assert!((edge[j] - w[j] / total).abs() < 1e-14);
        }
    }
}

#[test]
fn symmetric_laws_give_symmetric_gradients() {
    let p = ModelParams::new(2, 7.0).unwrap();
    let tree = FiniteSubtree::new(2, 2).unwrap();
    for b in solve(2, &p).unwrap() {
        let d = edge_gradient_distribution(&mixed_marginal(&b.law, &tree, &p).unwrap());
        for e in d {
            assert!((e[0] - e[2]).abs() < 1e-14, "{}", b.label);
        }
    }
}

#[test]
fn asymmetric_period4_law_pinned_breaks_gradient_symmetry() {
    // (1, x, 1, y) reversed is its own shift by 2, so the mixed measure stays
    // symmetric while the measure pinned at class 0 does not.
    let p = ModelParams::new(2, 8.0).unwrap();
    let tree = FiniteSubtree::new(2, 1).unwrap();
    let b = solve(4, &p)
        .unwrap()
        .into_iter()
        .find(|b| b.case == CaseTag::AsymPhi1)
        .unwrap();
    let pinned = edge_gradient_distribution(&marginal(&b.law, &tree, Pin::Class(0), &p).unwrap());
    assert!((pinned[0][0] - pinned[0][2]).abs() > 1e-3);
    let mixed = edge_gradient_distribution(&marginal(&b.law, &tree, Pin::Mixed, &p).unwrap());
    assert!((mixed[0][0] - mixed[0][2]).abs() < 1e-14);
}

#[test]
fn shift_partner_gives_the_same_mixed_marginal() {
    let p = ModelParams::new(2, 8.0).unwrap();
    let tree = FiniteSubtree::new(2, 2).unwrap();
    for q in [2, 3, 4] {
        for b in solve(q, &p).unwrap() {
            let base = mixed_marginal(&b.law, &tree, &p).unwrap();
            for r in 1..q as i64 {
                let shifted = mixed_marginal(&b.law.shifted(r), &tree, &p).unwrap();
                assert!(
                    max_diff(&base.probs, &shifted.probs) < 1e-12,
                    "q = {q}, {}, shift {r}",
                    b.label
                );
            }
        }
    }
}
