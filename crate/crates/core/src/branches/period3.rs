//! Period 3 in the pattern `(1, x, y)`:
//!
//! ```text
//! x = ((1 + y + theta x) / (theta + x + y))^k
//! y = ((1 + x + theta y) / (theta + x + y))^k
//! ```
//!
//! There is no polynomial reduction, so the solutions are found by damped
//! Newton in log coordinates from a fixed start set. The line `x = y` and the
//! axes `x = 1`, `y = 1` are invariant under the iteration and carry every
//! solution.

use serde::Serialize;

use crate::model::{critical_constants, relative_distance, ModelParams, DEDUP_TOL, RESIDUAL_TOL};
use crate::{Error, Result};

use super::{finish, CaseTag, SolutionBranch};

const MAX_ITER: usize = 200;
const MAX_HALVINGS: usize = 60;
/// Iteration stops below this; at a double root the noise floor is reached
/// well before it, and iteration ends when damping finds no decrease.
const LOG_TOL: f64 = 1e-15;
/// Accepted as converged below this.
const ACCEPT_TOL: f64 = 1e-12;
/// Newton only reaches about `sqrt(eps)` at a double root, so coordinates this
/// close to 1 are snapped onto the axis.
const SNAP_TOL: f64 = 1e-6;
const ESCAPE: (f64, f64) = (1e-12, 1e12);
/// Widest relative gap bridged when merging stalls around a degenerate root.
const MERGE_SPAN: f64 = 1e-3;
/// Coordinates this large carry rounding above the absolute residual
/// tolerance; the gate then falls back to a few ulps of the largest value.
const ULP_FLOOR: f64 = 32.0 * f64::EPSILON;

/// Outcome of one multistart run.
#[derive(Debug, Clone, Serialize)]
pub struct Period3Solutions {
    pub branches: Vec<SolutionBranch>,
    /// Starts that diverged, stalled or left the positive orthant.
    pub failed_starts: usize,
    /// Symmetry loci on which no start converged at all.
    pub incomplete: Vec<&'static str>,
}

/// The period-3 transition point, as a bracket with the solution counts
/// observed on either side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaC1Bracket {
    pub lo: f64,
    pub hi: f64,
    pub count_lo: usize,
    pub count_hi: usize,
}

impl ThetaC1Bracket {
    pub fn value(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, theta: f64, slack: f64) -> bool {
        theta >= self.lo - slack && theta <= self.hi + slack
    }
}

/// `G(u, v) = (u - k ln A, v - k ln B)` with `x = e^u`, `y = e^v`, and its
/// Jacobian.
fn system(u: f64, v: f64, params: &ModelParams) -> ([f64; 2], [[f64; 2]; 2]) {
    let theta = params.theta();
    let k = params.k() as f64;
    let (x, y) = (u.exp(), v.exp());
    let s = theta + x + y;
    let na = 1.0 + y + theta * x;
    let nb = 1.0 + x + theta * y;
    let g = [u - k * (na / s).ln(), v - k * (nb / s).ln()];
    let jac = [
        [
            1.0 - k * x * (theta / na - 1.0 / s),
            -k * y * (1.0 / na - 1.0 / s),
        ],
        [
            -k * x * (1.0 / nb - 1.0 / s),
            1.0 - k * y * (theta / nb - 1.0 / s),
        ],
    ];
    (g, jac)
}

/// `(x - A^k, y - B^k)` evaluated directly, not through logarithms.
fn linear(x: f64, y: f64, params: &ModelParams) -> [f64; 2] {
    let theta = params.theta();
    let k = params.k() as i32;
    let s = theta + x + y;
    [
        x - ((1.0 + y + theta * x) / s).powi(k),
        y - ((1.0 + x + theta * y) / s).powi(k),
    ]
}

/// Newton steps on the untransformed residual, restricted to the branch's
/// symmetry locus and kept while the residual falls. The log system
/// converges in relative terms, which leaves large coordinates short of an
/// absolute tolerance.
fn polish(mut x: f64, mut y: f64, case: CaseTag, params: &ModelParams) -> (f64, f64) {
    let mut f = linear(x, y, params);
    for _ in 0..4 {
        let (_, j) = system(x.ln(), y.ln(), params);
        // dF/du for F = z - rhs: diag(z) - diag(rhs) (I - J)
        let (r0, r1) = (x - f[0], y - f[1]);
        let d = [
            [x - r0 * (1.0 - j[0][0]), r0 * j[0][1]],
            [r1 * j[1][0], y - r1 * (1.0 - j[1][1])],
        ];
        let (du, dv) = match case {
            CaseTag::XEq1 => (0.0, f[1] / d[1][1]),
            CaseTag::YEq1 => (f[0] / d[0][0], 0.0),
            CaseTag::Diagonal => {
                let w = f[0] / (d[0][0] + d[0][1]);
                (w, w)
            }
            CaseTag::Unclassified => {
                let det = d[0][0] * d[1][1] - d[0][1] * d[1][0];
                (
                    (f[0] * d[1][1] - f[1] * d[0][1]) / det,
                    (d[0][0] * f[1] - d[1][0] * f[0]) / det,
                )
            }
            _ => break,
        };
        let (nx, ny) = (x * (-du).exp(), y * (-dv).exp());
        let nf = linear(nx, ny, params);
        if !(nx.is_finite() && ny.is_finite()) || norm(&nf) >= norm(&f) {
            break;
        }
        (x, y, f) = (nx, ny, nf);
    }
    (x, y)
}

fn norm(g: &[f64; 2]) -> f64 {
    g[0].abs().max(g[1].abs())
}

/// Damped Newton from `(x0, y0)`; `Some((x, y))` on convergence.
fn newton(x0: f64, y0: f64, params: &ModelParams) -> Option<(f64, f64)> {
    let (mut u, mut v) = (x0.ln(), y0.ln());
    let (mut g, mut jac) = system(u, v, params);
    let mut r = norm(&g);
    for _ in 0..MAX_ITER {
        if r < LOG_TOL {
            break;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let du = (g[0] * jac[1][1] - g[1] * jac[0][1]) / det;
        let dv = (jac[0][0] * g[1] - jac[1][0] * g[0]) / det;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let (nu, nv) = (u - step * du, v - step * dv);
            let (ng, njac) = system(nu, nv, params);
            let nr = norm(&ng);
            if nr.is_finite() && nr < r {
                (u, v, g, jac, r) = (nu, nv, ng, njac, nr);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        if u.abs() > ESCAPE.1.ln() || v.abs() > ESCAPE.1.ln() {
            return None;
        }
    }
    // a stalled iterate is accepted only if it already meets the tolerance
    // up to the noise floor of a double root
    if r > ACCEPT_TOL {
        return None;
    }
    let (x, y) = (u.exp(), v.exp());
    (x > ESCAPE.0 && x < ESCAPE.1 && y > ESCAPE.0 && y < ESCAPE.1).then_some((x, y))
}

fn log_space(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(move |i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Locus {
    Grid,
    Diagonal,
    XAxis,
    YAxis,
}

/// The deterministic start set: a 5 x 5 log grid plus 20 points on each
/// symmetry locus.
fn starts() -> Vec<(Locus, f64, f64)> {
    let grid = [1e-2, 1e-1, 1.0, 1e1, 1e2];
    let mut out: Vec<_> = grid
        .iter()
        .flat_map(|&x| grid.iter().map(move |&y| (Locus::Grid, x, y)))
        .collect();
    for t in log_space(1e-4, 1e4, 20) {
        out.push((Locus::Diagonal, t, t));
        out.push((Locus::XAxis, 1.0, t));
        out.push((Locus::YAxis, t, 1.0));
    }
    out
}

/// Close points with the residual at the noise floor all along the way
/// between them are stalls around one degenerate root.
fn same_root(a: (f64, f64), b: (f64, f64), params: &ModelParams) -> bool {
    let d = relative_distance(&[a.0, a.1], &[b.0, b.1]);
    if d <= DEDUP_TOL {
        return true;
    }
    if d > MERGE_SPAN {
        return false;
    }
    let (g, _) = system(
        0.5 * (a.0.ln() + b.0.ln()),
        0.5 * (a.1.ln() + b.1.ln()),
        params,
    );
    norm(&g) <= ACCEPT_TOL
}

fn snap(v: f64) -> f64 {
    if (v - 1.0).abs() <= SNAP_TOL {
        1.0
    } else {
        v
    }
}

fn classify(x: f64, y: f64) -> CaseTag {
    match (x == 1.0, y == 1.0) {
        (true, true) => CaseTag::Trivial,
        (true, false) => CaseTag::XEq1,
        (false, true) => CaseTag::YEq1,
        _ if relative_distance(&[x], &[y]) <= DEDUP_TOL => CaseTag::Diagonal,
        _ => CaseTag::Unclassified,
    }
}

/// Every positive solution reachable from the start set, deduplicated at
/// relative tolerance `1e-8`.
pub fn p3_solve(params: &ModelParams) -> Result<Period3Solutions> {
    let mut found: Vec<(f64, f64)> = Vec::new();
    let mut failed_starts = 0;
    let mut converged_on = [false; 4];
    for (locus, x0, y0) in starts() {
        let Some((x, y)) = newton(x0, y0, params) else {
            failed_starts += 1;
            continue;
        };
        converged_on[locus as usize] = true;
        let (x, y) = (snap(x), snap(y));
        if !found
            .iter()
            .any(|&(a, b)| same_root((a, b), (x, y), params))
        {
            found.push((x, y));
        }
    }

    let mut branches = Vec::with_capacity(found.len());
    for (x, y) in found {
        let case = classify(x, y);
        let (x, y) = if case == CaseTag::Diagonal {
            (0.5 * (x + y), 0.5 * (x + y))
        } else {
            (x, y)
        };
        let (x, y) = polish(x, y, case, params);
        let b = SolutionBranch::new(3, case, x, y, params, 1)?;
        if b.residual >= RESIDUAL_TOL.max(ULP_FLOOR * x.max(y)) {
            return Err(Error::Numeric(format!(
                "period-3 point ({x}, {y}) converged in log coordinates but has residual {:e}",
                b.residual
            )));
        }
        branches.push(b);
    }

    let names = [
        (Locus::Diagonal, "diagonal"),
        (Locus::XAxis, "x_eq_1"),
        (Locus::YAxis, "y_eq_1"),
    ];
    let incomplete = names
        .iter()
        .filter(|(l, _)| !converged_on[*l as usize])
        .map(|(_, n)| *n)
        .collect();
    Ok(Period3Solutions {
        branches: finish(branches),
        failed_starts,
        incomplete,
    })
}

fn count_at(k: u32, theta: f64) -> Result<usize> {
    Ok(p3_solve(&ModelParams::new(k, theta)?)?.branches.len())
}

/// Locate the first `theta > theta_0` where the period-3 solution count
/// leaves 1, to absolute accuracy `1e-6`.
///
/// A coarse scan finds the first step with more than one solution; bisection
/// then narrows the step.
pub fn p3_find_theta_c1(k: u32) -> Result<ThetaC1Bracket> {
    let theta_0 = critical_constants(k)?.theta_0;
    const UPPER: f64 = 100.0;
    const STEP: f64 = 0.05;

    let mut lo = theta_0;
    let mut count_lo = count_at(k, lo)?;
    if count_lo != 1 {
        return Err(Error::Numeric(format!(
            "expected a unique period-3 solution at theta_0 = {theta_0}, found {count_lo}"
        )));
    }
    let mut hi = None;
    let mut i = 1;
    while theta_0 + STEP * i as f64 <= UPPER {
        let t = theta_0 + STEP * i as f64;
        let c = count_at(k, t)?;
        if c > 1 {
            hi = Some((t, c));
            break;
        }
        lo = t;
        i += 1;
    }
    let Some((mut hi, mut count_hi)) = hi else {
        return Err(Error::Numeric(format!(
            "no period-3 transition in ({theta_0}, {UPPER}) for k = {k}"
        )));
    };
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let c = count_at(k, mid)?;
        if c > 1 {
            (hi, count_hi) = (mid, c);
        } else {
            (lo, count_lo) = (mid, c);
        }
    }
    Ok(ThetaC1Bracket {
        lo,
        hi,
        count_lo,
        count_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::boundary_law_residual;

    fn solve(k: u32, theta: f64) -> Period3Solutions {
        p3_solve(&ModelParams::new(k, theta).unwrap()).unwrap()
    }

    #[test]
    fn trivial_always_present() {
        for theta in [0.5, 3.0, 4.0, 10.0] {
            let s = solve(2, theta);
            assert!(s.branches.iter().any(|b| b.case == CaseTag::Trivial));
            assert!(s.incomplete.is_empty());
        }
    }

    #[test]
    fn unique_below_transition() {
        assert_eq!(solve(2, 3.0).branches.len(), 1);
    }

    #[test]
    fn seven_above_transition() {
        let s = solve(2, 10.0);
        assert_eq!(s.branches.len(), 7);
        let count = |c| s.branches.iter().filter(|b| b.case == c).count();
        assert_eq!(count(CaseTag::Diagonal), 2);
        assert_eq!(count(CaseTag::XEq1), 2);
        assert_eq!(count(CaseTag::YEq1), 2);
        // (1, v) pairs with (v, 1)
        for b in s.branches.iter().filter(|b| b.case == CaseTag::XEq1) {
            assert!(s
                .branches
                .iter()
                .any(|c| c.case == CaseTag::YEq1 && (c.x - b.y).abs() < 1e-8 * b.y));
        }
    }

    #[test]
    fn four_at_theta_cr() {
        let s = solve(2, 4.0);
        assert_eq!(s.branches.len(), 4, "{:?}", s.branches);
        let diag = s
            .branches
            .iter()
            .find(|b| b.case == CaseTag::Diagonal)
            .unwrap();
        assert!((diag.x - 0.25).abs() < 1e-10);
    }

    #[test]
    fn axis_partner_of_diagonal() {
        // (1, 1/s) solves the axis equation iff (s, s) solves the diagonal one
        let p = ModelParams::new(2, 10.0).unwrap();
        let s = p3_solve(&p).unwrap();
        for d in s.branches.iter().filter(|b| b.case == CaseTag::Diagonal) {
            let law = crate::HeightPattern::for_period(3)
                .unwrap()
                .law(1.0, 1.0 / d.x)
                .unwrap();
            assert!(boundary_law_residual(&law, &p).unwrap() < 1e-10);
        }
    }

    #[test]
    fn transition_for_k2() {
        let b = p3_find_theta_c1(2).unwrap();
        assert!(b.width() <= 1e-6);
        assert_eq!(b.count_lo, 1);
        assert!(b.count_hi >= 4);
        assert!(b.lo > 1.0 && b.hi < 4.0);
        assert_eq!(solve(2, b.value() + 0.1).branches.len(), 7);
    }
}
