//! Measure counts per period.
//!
//! A count has two parts. The census identifies branches numerically: two
//! solutions are one measure when one law is a height shift of the other
//! that stays inside the period's pattern. The reported `nu` equals the
//! census away from the critical values. Within [`THRESHOLD_TOL`] of one, it
//! takes the exact-threshold value instead, because the double roots there
//! make numerical counting unreliable. When the census differs from `nu`,
//! the mismatch is visible in [`PeriodCount::census_agrees`].

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::model::{critical_constants, cyclic_shift_orbit, ModelParams, DEDUP_TOL, THRESHOLD_TOL};
use crate::{Error, Result};

use super::period3::{p3_find_theta_c1, ThetaC1Bracket};
use super::{p2_solve, p3_solve, p4_solve, SolutionBranch};

/// Numerical solution counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Census {
    /// Distinct laws.
    pub raw: usize,
    /// Classes under pattern-preserving height shifts.
    pub identified: usize,
    /// Classes under all height shifts with rescaling.
    pub orbit_classes: usize,
}

/// A critical value that decided a count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodCount {
    pub q: usize,
    pub k: u32,
    pub theta: f64,
    pub nu: usize,
    pub census: Census,
    /// Set when `theta` sits on a critical value and `nu` came from the
    /// exact-threshold rule.
    pub threshold: Option<Threshold>,
    /// `nu` is only a lower bound (period 4 with k > 2).
    pub lower_bound: bool,
}

impl PeriodCount {
    pub fn census_agrees(&self) -> bool {
        self.census.identified == self.nu
    }
}

fn union_find_classes(n: usize, same: impl Fn(usize, usize) -> bool) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..i {
            if same(i, j) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| root(&mut parent, i) == i).count()
}

/// Count the branches of one period.
pub fn census(branches: &[SolutionBranch]) -> Census {
    let mut laws = Vec::new();
    for b in branches {
        if !laws
            .iter()
            .any(|l: &crate::PeriodicLaw| l.distance(&b.law) <= DEDUP_TOL)
        {
            laws.push(b.law.clone());
        }
    }
    let identified = union_find_classes(laws.len(), |i, j| {
        (1..laws[i].period() as i64).any(|r| laws[i].shifted(r).distance(&laws[j]) <= DEDUP_TOL)
    });
    let orbits: Vec<_> = laws.iter().map(cyclic_shift_orbit).collect();
    let orbit_classes = union_find_classes(laws.len(), |i, j| {
        let target = laws[j].normalized();
        orbits[i].iter().any(|m| m.distance(&target) <= DEDUP_TOL)
    });
    Census {
        raw: laws.len(),
        identified,
        orbit_classes,
    }
}

fn near(theta: f64, value: f64) -> bool {
    (theta - value).abs() <= THRESHOLD_TOL
}

fn assemble(
    q: usize,
    params: &ModelParams,
    branches: &[SolutionBranch],
    rule: Option<(Threshold, usize)>,
    lower_bound: bool,
) -> PeriodCount {
    let census = census(branches);
    let (threshold, nu) = match rule {
        Some((t, nu)) => (Some(t), nu),
        None => (None, census.identified),
    };
    PeriodCount {
        q,
        k: params.k(),
        theta: params.theta(),
        nu,
        census,
        threshold,
        lower_bound,
    }
}

/// Period-2 count: 2, except 1 at `theta_0` and 6 above `theta_c`.
pub fn p2_count(params: &ModelParams) -> Result<PeriodCount> {
    let c = critical_constants(params.k())?;
    let theta = params.theta();
    let mut rules = vec![
        (
            Threshold {
                name: "theta_0",
                value: c.theta_0,
            },
            1,
        ),
        (
            Threshold {
                name: "theta_c",
                value: c.theta_c,
            },
            2,
        ),
    ];
    // (x2, y2) passes through (1, y1) here, so the census sees one law fewer
    if let Some(c3) = c.theta_c3 {
        rules.push((
            Threshold {
                name: "theta_c3",
                value: c3,
            },
            6,
        ));
    }
    let rule = rules.into_iter().find(|(t, _)| near(theta, t.value));
    Ok(assemble(2, params, &p2_solve(params)?, rule, false))
}

fn theta_c1_cache(k: u32) -> Result<ThetaC1Bracket> {
    static CACHE: OnceLock<Mutex<HashMap<u32, ThetaC1Bracket>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache
        .lock()
        .map_err(|_| Error::Internal("poisoned cache".into()))?
        .get(&k)
    {
        return Ok(*b);
    }
    let b = p3_find_theta_c1(k)?;
    cache
        .lock()
        .map_err(|_| Error::Internal("poisoned cache".into()))?
        .insert(k, b);
    Ok(b)
}

/// Period-3 count: 1 below `theta_c1`, 3 at `theta_c1` and `theta_cr`, 5
/// otherwise. `theta_c1` is located once per `k` and cached.
pub fn p3_count(params: &ModelParams) -> Result<PeriodCount> {
    p3_count_with(params, &theta_c1_cache(params.k())?)
}

/// As [`p3_count`] with a precomputed `theta_c1` bracket. Every `theta`
/// inside the bracket counts as on-threshold.
pub fn p3_count_with(params: &ModelParams, c1: &ThetaC1Bracket) -> Result<PeriodCount> {
    let c = critical_constants(params.k())?;
    let theta = params.theta();
    let rule = if near(theta, c.theta_cr) {
        Some((
            Threshold {
                name: "theta_cr",
                value: c.theta_cr,
            },
            3,
        ))
    } else if c1.contains(theta, THRESHOLD_TOL) {
        Some((
            Threshold {
                name: "theta_c1",
                value: c1.value(),
            },
            3,
        ))
    } else {
        None
    };
    Ok(assemble(
        3,
        params,
        &p3_solve(params)?.branches,
        rule,
        false,
    ))
}

/// Period-4 count. For k = 2 the staircase 1, 2, 3, 4, 5 with steps at
/// 2, 6, 6 and `theta_c3`; for larger k only the symmetric solutions are
/// counted and the result is a lower bound.
pub fn p4_count(params: &ModelParams) -> Result<PeriodCount> {
    let c = critical_constants(params.k())?;
    let theta = params.theta();
    let (rules, lower_bound) = match c.theta_c3 {
        Some(c3) => (
            vec![
                (
                    Threshold {
                        name: "theta_0",
                        value: c.theta_0,
                    },
                    2,
                ),
                (
                    Threshold {
                        name: "theta_c",
                        value: c.theta_c,
                    },
                    3,
                ),
                (
                    Threshold {
                        name: "theta_c3",
                        value: c3,
                    },
                    5,
                ),
            ],
            false,
        ),
        None => (
            vec![(
                Threshold {
                    name: "theta_c",
                    value: c.theta_c,
                },
                2,
            )],
            true,
        ),
    };
    let rule = rules.into_iter().find(|(t, _)| near(theta, t.value));
    Ok(assemble(4, params, &p4_solve(params)?, rule, lower_bound))
}

pub fn period_count(q: usize, params: &ModelParams) -> Result<PeriodCount> {
    match q {
        2 => p2_count(params),
        3 => p3_count(params),
        4 => p4_count(params),
        _ => Err(Error::Unsupported(format!("period {q} has no count"))),
    }
}

/// Counts for all three periods at one `(k, theta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCount {
    pub theta: f64,
    pub k: u32,
    pub p2: PeriodCount,
    pub p3: PeriodCount,
    pub p4: PeriodCount,
}

impl PhaseCount {
    fn get(&self, q: usize) -> Option<&PeriodCount> {
        match q {
            2 => Some(&self.p2),
            3 => Some(&self.p3),
            4 => Some(&self.p4),
            _ => None,
        }
    }

    pub fn nu(&self, q: usize) -> Option<usize> {
        self.get(q).map(|c| c.nu)
    }

    pub fn raw(&self, q: usize) -> Option<usize> {
        self.get(q).map(|c| c.census.raw)
    }
}

pub fn phase_count(params: &ModelParams) -> Result<PhaseCount> {
    Ok(PhaseCount {
        theta: params.theta(),
        k: params.k(),
        p2: p2_count(params)?,
        p3: p3_count(params)?,
        p4: p4_count(params)?,
    })
}
