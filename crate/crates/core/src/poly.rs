//! Positive real roots of univariate real polynomials.
//!
//! Roots are isolated by splitting `(0, B]` (with `B` the Cauchy bound) at
//! the positive critical points, found recursively from the derivative. On
//! each resulting interval the polynomial is monotone, so a sign change
//! brackets exactly one simple root, which is bisected and given one guarded
//! Newton step. A critical point where `|p|` is below the flatness tolerance
//! is a multiple root; its multiplicity is one more than its multiplicity as
//! a root of `p'`.

use serde::Serialize;

use crate::{Error, Result};

/// `|p(c)| <= FLAT_TOL * sum_i |c_i| c^i` marks a critical point as a root.
pub const FLAT_TOL: f64 = 1e-9;

/// Target relative width of a bisection bracket before polishing.
const BISECT_REL: f64 = 1e-14;

/// A real polynomial with coefficients in ascending degree order, degree at
/// least 1 and a nonzero leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped before validation.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite polynomial coefficient".into()));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Domain(
                "polynomial must have degree at least 1".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    /// `prod_i (x - r_i)`.
    pub fn from_roots(roots: &[f64]) -> Result<Self> {
        let c = roots
            .iter()
            .fold(vec![1.0], |acc, r| mul_coeffs(&acc, &[-r, 1.0]));
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    /// `sum_i |c_i| x^i`, the scale against which `p(x)` is judged small.
    pub fn magnitude(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x.abs() + c.abs())
    }

    /// `None` when the derivative is constant.
    pub fn derivative(&self) -> Option<Self> {
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| i as f64 * c)
            .collect();
        Self::new(d).ok()
    }

    /// `1 + max_i |c_i| / |c_lead|`; every root lies in `(-B, B)`.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.coeffs[self.degree()].abs();
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .map(|c| c.abs() / lead)
            .fold(0.0, f64::max)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Product of two ascending coefficient arrays.
pub fn mul_coeffs(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn pow_coeffs(a: &[f64], n: u32) -> Vec<f64> {
    (0..n).fold(vec![1.0], |acc, _| mul_coeffs(&acc, a))
}

/// `a - b`.
pub fn sub_coeffs(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0))
        .collect()
}

/// Synthetic division by `(x - r)`; returns quotient and remainder.
pub fn deflate(coeffs: &[f64], r: f64) -> (Vec<f64>, f64) {
    let n = coeffs.len();
    if n < 2 {
        return (Vec::new(), coeffs.first().copied().unwrap_or(0.0));
    }
    let mut q = vec![0.0; n - 1];
    let mut carry = coeffs[n - 1];
    for i in (0..n - 1).rev() {
        q[i] = carry;
        carry = coeffs[i] + carry * r;
    }
    (q, carry)
}

/// Strict sign changes in the nonzero coefficients.
pub fn sign_changes(coeffs: &[f64]) -> Result<usize> {
    let signs: Vec<bool> = coeffs
        .iter()
        .filter(|c| **c != 0.0)
        .map(|c| *c > 0.0)
        .collect();
    if signs.is_empty() {
        return Err(Error::Domain("sign changes of the zero polynomial".into()));
    }
    Ok(signs.windows(2).filter(|w| w[0] != w[1]).count())
}

pub fn descartes_sign_changes(p: &Polynomial) -> usize {
    // a validated polynomial always has a nonzero coefficient
    sign_changes(p.coeffs()).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub value: f64,
    /// 1 for a simple root; larger when the root sits on a flat critical point.
    pub multiplicity: u32,
}

impl Root {
    pub fn is_multiple(&self) -> bool {
        self.multiplicity > 1
    }
}

/// Sorted positive roots together with the Descartes bound of the polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    roots: Vec<Root>,
    sign_changes: usize,
}

impl RootSet {
    /// Checks separation and, when `full_axis` is set, Descartes' rule:
    /// the count with multiplicity is at most the sign-change count and has
    /// the same parity.
    fn new(roots: Vec<Root>, sign_changes: usize, full_axis: bool) -> Result<Self> {
        for w in roots.windows(2) {
            if !(w[1].value - w[0].value > BISECT_REL * w[1].value) {
                return Err(Error::Internal(format!(
                    "roots {} and {} are not separated",
                    w[0].value, w[1].value
                )));
            }
        }
        let counted: usize = roots.iter().map(|r| r.multiplicity as usize).sum();
        if counted > sign_changes || (full_axis && !(sign_changes - counted).is_multiple_of(2)) {
            return Err(Error::Internal(format!(
                "{counted} positive roots (with multiplicity) contradict {sign_changes} sign changes"
            )));
        }
        Ok(Self {
            roots,
            sign_changes,
        })
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn sign_changes(&self) -> usize {
        self.sign_changes
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// All positive real roots of `p`, optionally restricted to `bracket_hint`.
pub fn positive_roots(p: &Polynomial, bracket_hint: Option<(f64, f64)>) -> Result<RootSet> {
    let v = descartes_sign_changes(p);
    // divide out roots at zero
    let first = p.coeffs().iter().position(|c| *c != 0.0).unwrap_or(0);
    let stripped = match Polynomial::new(p.coeffs()[first..].to_vec()) {
        Ok(s) => s,
        Err(_) => return RootSet::new(Vec::new(), v, bracket_hint.is_none()),
    };
    let bound = stripped.cauchy_bound();
    let (lo, hi) = match bracket_hint {
        None => (0.0, bound),
        Some((a, b)) => {
            if !(a < b) {
                return Err(Error::Domain(format!("empty bracket hint ({a}, {b})")));
            }
            (a.max(0.0), b.min(bound))
        }
    };
    let roots = if lo < hi {
        roots_in(&stripped, lo, hi)?
    } else {
        Vec::new()
    };
    RootSet::new(roots, v, bracket_hint.is_none())
}

struct Node {
    x: f64,
    value: f64,
    root: Option<u32>,
}

fn roots_in(p: &Polynomial, lo: f64, hi: f64) -> Result<Vec<Root>> {
    if p.degree() == 1 {
        let r = -p.coeffs()[0] / p.coeffs()[1];
        return Ok(if r > lo && r < hi {
            vec![Root {
                value: r,
                multiplicity: 1,
            }]
        } else {
            Vec::new()
        });
    }
    let critical = match p.derivative() {
        Some(d) => roots_in(&d, lo, hi)?,
        None => Vec::new(),
    };
    let flat = |x: f64, v: f64| v.abs() <= FLAT_TOL * p.magnitude(x);

    let mut nodes = Vec::with_capacity(critical.len() + 2);
    let v_lo = p.eval(lo);
    nodes.push(Node {
        x: lo,
        value: v_lo,
        root: (lo > 0.0 && flat(lo, v_lo)).then_some(1),
    });
    for c in &critical {
        let v = p.eval(c.value);
        nodes.push(Node {
            x: c.value,
            value: v,
            root: flat(c.value, v).then_some(c.multiplicity + 1),
        });
    }
    let v_hi = p.eval(hi);
    nodes.push(Node {
        x: hi,
        value: v_hi,
        root: flat(hi, v_hi).then_some(1),
    });

    let mut roots = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        if let Some(m) = n.root {
            roots.push(Root {
                value: n.x,
                multiplicity: m,
            });
        }
        if let Some(next) = nodes.get(i + 1) {
            if n.root.is_some() || next.root.is_some() {
                continue;
            }
            if (n.value < 0.0) != (next.value < 0.0) {
                roots.push(Root {
                    value: bisect(p, n.x, next.x, n.value)?,
                    multiplicity: 1,
                });
            }
        }
    }
    Ok(roots)
}

fn bisect(p: &Polynomial, mut a: f64, mut b: f64, fa: f64) -> Result<f64> {
    let neg_at_a = fa < 0.0;
    for _ in 0..2200 {
        let mid = 0.5 * (a + b);
        if b - a <= BISECT_REL * mid.abs() || mid <= a || mid >= b {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == neg_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mid = 0.5 * (a + b);
    if !mid.is_finite() {
        return Err(Error::Internal("bisection left the real line".into()));
    }
    // guarded Newton polish: keep the step only inside the bracket and only
    // if it does not increase |p|
    let fm = p.eval(mid);
    if let Some(d) = p.derivative() {
        let dm = d.eval(mid);
        if dm != 0.0 {
            let x = mid - fm / dm;
            if x >= a && x <= b && p.eval(x).abs() <= fm.abs() {
                return Ok(x);
            }
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn sign_change_examples() {
        // 2 s^{k-1} - theta (s^{k-2} + ... + 1) always has one change
        for k in 2..8 {
            for theta in [0.1, 1.0, 7.5] {
                let mut c = vec![-theta; k - 1];
                c.push(2.0);
                assert_eq!(descartes_sign_changes(&poly(&c)), 1);
            }
        }
        assert_eq!(descartes_sign_changes(&poly(&[1.0, 0.0, 1.0])), 0);
        assert_eq!(descartes_sign_changes(&poly(&[2.0, -8.0, 2.0])), 2);
        assert!(sign_changes(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn quadratic_pair() {
        let rs = positive_roots(&poly(&[2.0, -8.0, 2.0]), None).unwrap();
        let s3 = 3f64.sqrt();
        assert_eq!(rs.len(), 2);
        assert!((rs.values()[0] - (2.0 - s3)).abs() <= 1e-12 * (2.0 - s3));
        assert!((rs.values()[1] - (2.0 + s3)).abs() <= 1e-12 * (2.0 + s3));
        assert_eq!(rs.sign_changes(), 2);
    }

    #[test]
    fn linear_root() {
        let rs = positive_roots(&poly(&[-4.0, 2.0]), None).unwrap();
        assert_eq!(rs.values(), vec![2.0]);
    }

    #[test]
    fn double_root_is_flagged_once() {
        let rs = positive_roots(&poly(&[2.0, -4.0, 2.0]), None).unwrap();
        assert_eq!(rs.len(), 1);
        assert!((rs.roots()[0].value - 1.0).abs() < 1e-12);
        assert_eq!(rs.roots()[0].multiplicity, 2);
    }

    #[test]
    fn triple_root() {
        // 4 (y - 1)^3
        let rs = positive_roots(&poly(&[-4.0, 12.0, -12.0, 4.0]), None).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs.roots()[0].multiplicity, 3);
        assert!((rs.roots()[0].value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn no_positive_roots() {
        assert!(positive_roots(&poly(&[1.0, 0.0, 1.0]), None)
            .unwrap()
            .is_empty());
        assert!(positive_roots(&poly(&[1.0, 3.0, 2.0]), None)
            .unwrap()
            .is_empty());
        // x^3: root at zero only
        assert!(positive_roots(&poly(&[0.0, 0.0, 0.0, 1.0]), None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn zero_root_is_stripped() {
        // x (x - 3)
        let rs = positive_roots(&poly(&[0.0, -3.0, 1.0]), None).unwrap();
        assert_eq!(rs.values(), vec![3.0]);
    }

    #[test]
    fn bracket_hint_restricts() {
        let p = Polynomial::from_roots(&[0.5, 2.0, 8.0]).unwrap();
        let rs = positive_roots(&p, Some((1.0, 4.0))).unwrap();
        assert_eq!(rs.len(), 1);
        assert!((rs.values()[0] - 2.0).abs() < 1e-12);
        assert!(positive_roots(&p, Some((3.0, 1.0))).is_err());
    }

    #[test]
    fn deflation() {
        let (q, r) = deflate(&[-6.0, 11.0, -6.0, 1.0], 1.0);
        assert!(r.abs() < 1e-15);
        assert_eq!(q, vec![6.0, -5.0, 1.0]);
    }

    #[test]
    fn invalid_polynomials() {
        assert!(Polynomial::new(vec![0.0, 0.0]).is_err());
        assert!(Polynomial::new(vec![3.0]).is_err());
        assert!(Polynomial::new(vec![1.0, f64::NAN]).is_err());
        assert_eq!(Polynomial::new(vec![1.0, 2.0, 0.0]).unwrap().degree(), 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Roots log-uniform in [1e-3, 1e3], pairwise ratio at least 1.05.
        fn separated_roots() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-3.0f64..3.0, 1..6).prop_filter_map(
                "well separated",
                |exps| {
                    let mut r: Vec<f64> = exps.iter().map(|e| 10f64.powf(*e)).collect();
                    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    r.windows(2).all(|w| w[1] / w[0] >= 1.05).then_some(r)
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn recovers_constructed_roots(roots in separated_roots(), lead in 0.1f64..10.0, neg in 0usize..3) {
                // optional extra negative roots must not show up
                let mut all = roots.clone();
                for i in 0..neg {
                    all.push(-(i as f64 + 0.5));
                }
                let base = Polynomial::from_roots(&all).unwrap();
                let p = Polynomial::new(base.coeffs().iter().map(|c| c * lead).collect()).unwrap();
                let rs = positive_roots(&p, None).unwrap();
                prop_assert_eq!(rs.len(), roots.len());
                let counted: usize = rs.roots().iter().map(|r| r.multiplicity as usize).sum();
                prop_assert!(counted <= rs.sign_changes());
                prop_assert_eq!((rs.sign_changes() - counted) % 2, 0);
                let cmax = p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
                for (got, want) in rs.values().iter().zip(&roots) {
                    prop_assert!((got - want).abs() <= 1e-9 * want, "{} vs {}", got, want);
                    let bound = 1e-9 * cmax * got.powi(p.degree() as i32).max(1.0);
                    prop_assert!(p.eval(*got).abs() <= bound);
                }
            }
        }
    }
}
