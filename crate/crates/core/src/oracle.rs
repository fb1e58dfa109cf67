//! Brute-force cross-check for the branch solvers.
//!
//! The oracle knows nothing but the constant boundary-law equation. It runs
//! damped Newton on the free classes of a period's pattern, in log
//! coordinates, from a fixed lattice of starts, and clusters whatever
//! converges. It deliberately does not depend on [`crate::branches`].

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::json::{sig17_vec, Sig17};
use crate::model::{
    boundary_law_residual, boundary_law_rhs, HeightPattern, ModelParams, PeriodicLaw, Slot,
    DEDUP_TOL, RESIDUAL_TOL,
};
use crate::{Error, Result};

pub const ORACLE_SCHEMA: &str = "sos-ggm/oracle/1";

const MAX_ITER: usize = 200;
const MAX_HALVINGS: usize = 60;
const STOP_TOL: f64 = 1e-15;
const ACCEPT_TOL: f64 = 1e-12;
const BOUNDS: (f64, f64) = (1e-12, 1e12);
/// Start lattices as (points per free coordinate, decades either side of 1):
/// a wide one, and a fine one near 1 where basins are crowded.
const LATTICES: [(usize, f64); 2] = [(16, 4.0), (16, 1.0)];
/// Widest relative gap bridged when merging a degenerate root's stalls.
const MERGE_SPAN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub q: usize,
    pub k: u32,
    pub theta: f64,
    /// Distinct solutions in lexicographic order of their values.
    pub found_solutions: Vec<PeriodicLaw>,
    pub max_residual: f64,
    /// Starts that did not converge or escaped the positive orthant.
    pub discarded: usize,
    /// Set by [`OracleReport::compare`].
    pub agreement: Option<bool>,
}

/// Pairing of oracle solutions with an expected set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub matched: usize,
    /// Expected laws with no oracle solution within tolerance.
    pub missing: Vec<PeriodicLaw>,
    /// Oracle solutions left unpaired.
    pub extra: Vec<PeriodicLaw>,
}

impl Agreement {
    pub fn is_full(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl OracleReport {
    /// Pair `expected` with the found solutions one-to-one at relative
    /// tolerance `1e-8`, and record the verdict.
    pub fn compare(&mut self, expected: &[PeriodicLaw]) -> Agreement {
        let mut expected_distinct: Vec<&PeriodicLaw> = Vec::new();
        for e in expected {
            if !expected_distinct.iter().any(|d| d.distance(e) <= DEDUP_TOL) {
                expected_distinct.push(e);
            }
        }
        let mut used = vec![false; self.found_solutions.len()];
        let mut missing = Vec::new();
        for e in expected_distinct {
            let best = self
                .found_solutions
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, f)| (i, f.distance(e)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((i, d)) if d <= DEDUP_TOL => used[i] = true,
                _ => missing.push(e.clone()),
            }
        }
        let extra: Vec<_> = self
            .found_solutions
            .iter()
            .zip(&used)
            .filter(|(_, u)| !**u)
            .map(|(f, _)| f.clone())
            .collect();
        let matched = used.iter().filter(|u| **u).count();
        let a = Agreement {
            matched,
            missing,
            extra,
        };
        self.agreement = Some(a.is_full());
        a
    }

    pub fn to_json(&self) -> OracleJson {
        OracleJson {
            schema: ORACLE_SCHEMA,
            oracle: true,
            q: self.q,
            k: self.k,
            theta: Sig17(self.theta),
            branches: self
                .found_solutions
                .iter()
                .map(|l| OracleBranchJson {
                    law: sig17_vec(l.values()),
                })
                .collect(),
            max_residual: Sig17(self.max_residual),
            discarded: self.discarded,
            agreement: self.agreement,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OracleBranchJson {
    pub law: Vec<Sig17>,
}

#[derive(Debug, Serialize)]
pub struct OracleJson {
    pub schema: &'static str,
    pub oracle: bool,
    pub q: usize,
    pub k: u32,
    pub theta: Sig17,
    pub branches: Vec<OracleBranchJson>,
    pub max_residual: Sig17,
    pub discarded: usize,
    pub agreement: Option<bool>,
}

/// The free classes of period `q` and the full value vector for given free
/// log-values.
struct Problem<'a> {
    q: usize,
    free: Vec<usize>,
    params: &'a ModelParams,
}

impl Problem<'_> {
    fn values(&self, u: &DVector<f64>) -> Vec<f64> {
        let mut z = vec![1.0; self.q];
        for (j, &c) in self.free.iter().enumerate() {
            z[c] = u[j].exp();
        }
        z
    }

    /// `G_i = ln z_i - k (ln N_i - ln D)` over free classes `i`, and the
    /// Jacobian in the free log-coordinates.
    fn eval(&self, u: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let q = self.q;
        let theta = self.params.theta();
        let k = self.params.k() as f64;
        let z = self.values(u);
        let at = |i: i64| z[i.rem_euclid(q as i64) as usize];
        let d = theta + at(-1) + at(1);
        // dD/dz_c
        let dd = |c: usize| ((c == q - 1) as u8 + (c == 1) as u8) as f64;
        let n = self.free.len();
        let mut g = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, n);
        for (r, &i) in self.free.iter().enumerate() {
            let ii = i as i64;
            let num = theta * z[i] + at(ii - 1) + at(ii + 1);
            g[r] = z[i].ln() - k * (num.ln() - d.ln());
            for (col, &c) in self.free.iter().enumerate() {
                let dn = theta * (c == i) as u8 as f64
                    + (c == (ii - 1).rem_euclid(q as i64) as usize) as u8 as f64
                    + (c == (ii + 1).rem_euclid(q as i64) as usize) as u8 as f64;
                jac[(r, col)] = (r == col) as u8 as f64 - k * z[c] * (dn / num - dd(c) / d);
            }
        }
        (g, jac)
    }

    /// Converged log-coordinates and final residual, or `None`.
    fn newton(&self, mut u: DVector<f64>) -> Option<(DVector<f64>, f64)> {
        let (mut g, mut jac) = self.eval(&u);
        let mut r = g.amax();
        let limit = BOUNDS.1.ln();
        for _ in 0..MAX_ITER {
            if r < STOP_TOL {
                break;
            }
            let step = jac.clone().lu().solve(&g)?;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..MAX_HALVINGS {
                let cand = &u - &step * t;
                let (cg, cj) = self.eval(&cand);
                let cr = cg.amax();
                if cr.is_finite() && cr < r {
                    (u, g, jac, r) = (cand, cg, cj, cr);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            if u.amax() > limit {
                return None;
            }
        }
        if r > ACCEPT_TOL || u.amax() >= limit {
            return None;
        }
        Some((u, r))
    }

    /// `max_i |z_i - rhs_i|` over all classes.
    fn linear_residual(&self, u: &DVector<f64>) -> Option<(f64, DVector<f64>)> {
        let z = self.values(u);
        let rhs = boundary_law_rhs(&PeriodicLaw::new(z.clone()).ok()?, self.params).ok()?;
        let f = DVector::from_iterator(self.free.len(), self.free.iter().map(|&c| z[c] - rhs[c]));
        let all = z
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Some((all, f))
    }

    /// Newton steps on `z - rhs` itself, taken in log-coordinates and kept
    /// while the absolute residual falls. The log system converges in
    /// relative terms, which leaves large coordinates short of an absolute
    /// tolerance.
    fn polish(&self, mut u: DVector<f64>) -> DVector<f64> {
        let Some((mut r, mut f)) = self.linear_residual(&u) else {
            return u;
        };
        for _ in 0..4 {
            let (g, jac) = self.eval(&u);
            let z = self.values(&u);
            let n = self.free.len();
            // dF/du = diag(z) - diag(rhs) (I - J), with rhs_i = z_i exp(-g_i)
            let mut jf = DMatrix::zeros(n, n);
            for (row, &c) in self.free.iter().enumerate() {
                let rhs = z[c] * (-g[row]).exp();
                for col in 0..n {
                    let eye = (row == col) as u8 as f64;
                    jf[(row, col)] = z[c] * eye - rhs * (eye - jac[(row, col)]);
                }
            }
            let Some(step) = jf.lu().solve(&f) else { break };
            let cand = &u - step;
            match self.linear_residual(&cand) {
                Some((cr, cf)) if cr < r => (u, r, f) = (cand, cr, cf),
                _ => break,
            }
        }
        u
    }

    /// Two converged points belong to one root when they are close and the
    /// residual stays at the noise floor between them. Degenerate roots
    /// leave Newton stalled anywhere in a flat valley around the root;
    /// distinct roots have a residual bump in between.
    fn same_root(&self, a: &DVector<f64>, b: &DVector<f64>) -> bool {
        let za = self.values(a);
        let zb = self.values(b);
        let d = crate::model::relative_distance(&za, &zb);
        if d <= DEDUP_TOL {
            return true;
        }
        if d > MERGE_SPAN {
            return false;
        }
        let mid = (a + b) * 0.5;
        self.eval(&mid).0.amax() <= ACCEPT_TOL
    }
}

/// The deterministic start lattices: `n^d` points each, log-uniform in
/// every free coordinate.
fn starts(dim: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    for (n, decades) in LATTICES {
        let axis: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                (2.0 * t - 1.0) * decades * std::f64::consts::LN_10
            })
            .collect();
        out.extend((0..n.pow(dim as u32)).map(|mut idx| {
            let mut v = DVector::zeros(dim);
            for j in 0..dim {
                v[j] = axis[idx % n];
                idx /= n;
            }
            v
        }));
    }
    out
}

/// Solve the period-`q` boundary-law equation in the classes that the
/// period's pattern leaves free, the rest held at 1.
pub fn oracle_solve(q: usize, params: &ModelParams) -> Result<OracleReport> {
    let pattern = HeightPattern::for_period(q)?;
    let free: Vec<usize> = pattern
        .slots()
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != Slot::One)
        .map(|(i, _)| i)
        .collect();
    let problem = Problem { q, free, params };

    let mut found: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut discarded = 0;
    for start in starts(problem.free.len()) {
        match problem.newton(start) {
            Some(p) => found.push(p),
            None => discarded += 1,
        }
    }
    found.sort_by(|a, b| {
        a.0.iter()
            .zip(b.0.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    // clusters are anchored at their first member; the log-mean sits close to
    // a degenerate root that no single stall hits, while at large magnitudes
    // the best single member can have the smaller residual
    struct Cluster {
        anchor: DVector<f64>,
        sum: DVector<f64>,
        n: usize,
        best: DVector<f64>,
        best_r: f64,
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    for (u, r) in found {
        match clusters
            .iter_mut()
            .find(|c| problem.same_root(&c.anchor, &u))
        {
            Some(c) => {
                c.sum += &u;
                c.n += 1;
                if r < c.best_r {
                    c.best = u;
                    c.best_r = r;
                }
            }
            None => clusters.push(Cluster {
                anchor: u.clone(),
                sum: u.clone(),
                n: 1,
                best: u,
                best_r: r,
            }),
        }
    }

    let mut laws: Vec<PeriodicLaw> = Vec::new();
    let mut max_residual = 0.0f64;
    for c in clusters {
        let mut candidates = Vec::with_capacity(2);
        for u in [c.sum / c.n as f64, c.best] {
            let u = problem.polish(u);
            let law = PeriodicLaw::new(problem.values(&u))?;
            let r = boundary_law_residual(&law, params)?;
            candidates.push((r, law));
        }
        let (r, law) = candidates
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("two candidates");
        if r >= RESIDUAL_TOL {
            discarded += 1;
            continue;
        }
        max_residual = max_residual.max(r);
        laws.push(law);
    }
    laws.sort_by(|a, b| {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(OracleReport {
        q,
        k: params.k(),
        theta: params.theta(),
        found_solutions: laws,
        max_residual,
        discarded,
        agreement: None,
    })
}

/// One continuous curve through an oracle sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Track {
    pub id: usize,
    /// `(grid index, law)` in increasing grid order, without gaps.
    pub points: Vec<(usize, PeriodicLaw)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSweep {
    pub reports: Vec<OracleReport>,
    pub tracks: Vec<Track>,
}

fn log_distance(a: &PeriodicLaw, b: &PeriodicLaw) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x.ln() - y.ln()).abs())
        .fold(0.0, f64::max)
}

/// Oracle reports over an ascending grid, with solutions linked into tracks
/// by greedy nearest-neighbour matching between adjacent grid points.
pub fn oracle_sweep(q: usize, k: u32, grid: &[f64]) -> Result<OracleSweep> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "theta grid must be strictly ascending".into(),
        ));
    }
    let reports = grid
        .iter()
        .map(|&t| oracle_solve(q, &ModelParams::new(k, t)?))
        .collect::<Result<Vec<_>>>()?;

    let mut tracks: Vec<Track> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for (gi, report) in reports.iter().enumerate() {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ai, &t) in active.iter().enumerate() {
            let last = &tracks[t].points.last().expect("tracks are never empty").1;
            for (si, s) in report.found_solutions.iter().enumerate() {
                pairs.push((log_distance(last, s), ai, si));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut track_used = vec![false; active.len()];
        let mut sol_track: Vec<Option<usize>> = vec![None; report.found_solutions.len()];
        for (_, ai, si) in pairs {
            if !track_used[ai] && sol_track[si].is_none() {
                track_used[ai] = true;
                sol_track[si] = Some(active[ai]);
            }
        }
        let mut next_active = Vec::new();
        for (si, s) in report.found_solutions.iter().enumerate() {
            let t = match sol_track[si] {
                Some(t) => t,
                None => {
                    tracks.push(Track {
                        id: tracks.len(),
                        points: Vec::new(),
                    });
                    tracks.len() - 1
                }
            };
            tracks[t].points.push((gi, s.clone()));
            next_active.push(t);
        }
        next_active.sort_unstable();
        active = next_active;
    }
    Ok(OracleSweep { reports, tracks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(q: usize, theta: f64) -> OracleReport {
        oracle_solve(q, &ModelParams::new(2, theta).unwrap()).unwrap()
    }

    fn law(v: &[f64]) -> PeriodicLaw {
        PeriodicLaw::new(v.to_vec()).unwrap()
    }

    #[test]
    fn period2_low_theta() {
        // (1, 1) and the diagonal (s^2, s^2) with 2s - 1 = 0
        let r = solve(2, 1.0);
        assert_eq!(r.found_solutions.len(), 2, "{:?}", r.found_solutions);
        let mut r = r;
        assert!(r.compare(&[law(&[1.0, 1.0]), law(&[0.25, 0.25])]).is_full());
    }

    #[test]
    fn period2_above_critical() {
        let mut r = solve(2, 7.0);
        assert_eq!(r.found_solutions.len(), 6);
        let expected = [
            law(&[1.0, 1.0]),
            law(&[1.0, 0.25]),
            law(&[1.0, 4.0]),
            law(&[12.25, 12.25]),
            law(&[0.765625, 3.0625]),
            law(&[196.0, 49.0]),
        ];
        let a = r.compare(&expected);
        assert!(a.is_full(), "{a:?}");
        assert_eq!(r.agreement, Some(true));
        assert!(r.max_residual < 1e-10);
    }

    #[test]
    fn mismatch_is_reported() {
        let mut r = solve(2, 7.0);
        let a = r.compare(&[law(&[1.0, 1.0]), law(&[1.0, 5.0])]);
        assert_eq!(a.matched, 1);
        assert_eq!(a.missing.len(), 1);
        assert_eq!(a.extra.len(), 5);
        assert_eq!(r.agreement, Some(false));
    }

    #[test]
    fn period4_vieta_pairs() {
        let r = solve(4, 8.0);
        let asym: Vec<_> = r
            .found_solutions
            .iter()
            .filter(|l| (l.values()[1] - l.values()[3]).abs() > 1e-6)
            .collect();
        assert_eq!(asym.len(), 4);
        for l in asym {
            let (x, y) = (l.values()[1], l.values()[3]);
            assert!((x * y - 4.0 / 64.0).abs() < 1e-10);
        }
    }

    #[test]
    fn period3_count() {
        assert_eq!(solve(3, 3.0).found_solutions.len(), 1);
        assert_eq!(solve(3, 10.0).found_solutions.len(), 7);
    }

    #[test]
    fn solutions_stay_in_bounds() {
        for theta in [0.2, 5.0, 12.0] {
            for q in 2..=4 {
                for l in solve(q, theta).found_solutions {
                    assert!(l.values().iter().all(|v| *v > 1e-12 && *v < 1e12));
                }
            }
        }
    }

    #[test]
    fn sweep_tracks() {
        // off the degenerate point theta = 6, where stalls only reach ~1e-5
        let grid: Vec<f64> = (0..20).map(|i| 5.1 + 0.2 * i as f64).collect();
        let s = oracle_sweep(2, 2, &grid).unwrap();
        assert_eq!(s.reports.len(), 20);
        // the trivial law is present throughout and forms one full-length track
        assert!(s.tracks.iter().any(|t| t.points.len() == 20
            && t.points
                .iter()
                .all(|(_, l)| l.values().iter().all(|v| (v - 1.0).abs() < 1e-12))));
        for t in &s.tracks {
            for w in t.points.windows(2) {
                assert_eq!(w[1].0, w[0].0 + 1);
            }
        }
        assert!(oracle_sweep(2, 2, &[2.0, 1.0]).is_err());
    }
}
