//! Model parameters, the transfer kernel on the constraint graph, critical
//! constants and the constant boundary-law residual.

use serde::Serialize;

use crate::{Error, Result};

/// Residual below which a law counts as an exact solution.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Relative max-norm under which two solutions are the same point.
pub const DEDUP_TOL: f64 = 1e-8;

/// Distance to a closed-form critical value under which a query is answered
/// by the exact-threshold case of the counting formulas.
pub const THRESHOLD_TOL: f64 = 1e-9;

/// Branching number `k` and activity `theta = exp(J * beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    k: u32,
    theta: f64,
}

impl ModelParams {
    pub fn new(k: u32, theta: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!(
                "branching number k = {k} must be at least 2"
            )));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::Domain(format!(
                "theta = {theta} must be positive and finite"
            )));
        }
        Ok(Self { k, theta })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Same `k`, different `theta`.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.k, theta)
    }
}

/// Edge weight for a height difference `delta`, in the cleared form
/// `theta` on equal heights, `1` on unit steps, `0` otherwise.
pub fn transfer_weight(delta: i64, params: &ModelParams) -> f64 {
    match delta.abs() {
        0 => params.theta,
        1 => 1.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalConstants {
    pub k: u32,
    /// `2 / (k - 1)`: the diagonal period-2 branch passes through 1.
    pub theta_0: f64,
    /// `2 (k + 1) / (k - 1)`: pitchfork of the `x = 1` period-2 family.
    pub theta_c: f64,
    /// `(k + 2) / (k - 1)`: transcritical point of the period-3 system.
    pub theta_cr: f64,
    /// Birth of the second asymmetric period-4 pair (k = 2 only).
    pub theta_c3: Option<f64>,
    /// Sign change of `8 - theta^3 + 2 theta^2` (k = 2 only).
    pub theta_star2: Option<f64>,
}

pub fn critical_constants(k: u32) -> Result<CriticalConstants> {
    if k < 2 {
        return Err(Error::Domain(format!(
            "branching number k = {k} must be at least 2"
        )));
    }
    let kf = k as f64;
    let (theta_c3, theta_star2) = if k == 2 {
        // Real root of theta^3 - 6 theta^2 - 4 theta - 8.
        let c = (54.0 + 6.0 * 33f64.sqrt()).cbrt();
        let c3 = 2.0 / 3.0 * c + 8.0 / c + 2.0;
        // Real root of theta^3 - 2 theta^2 - 8.
        let s = (116.0 + 12.0 * 93f64.sqrt()).cbrt();
        let star2 = s / 3.0 + 4.0 / (3.0 * s) + 2.0 / 3.0;
        (Some(c3), Some(star2))
    } else {
        (None, None)
    };
    Ok(CriticalConstants {
        k,
        theta_0: 2.0 / (kf - 1.0),
        theta_c: 2.0 * (kf + 1.0) / (kf - 1.0),
        theta_cr: (kf + 2.0) / (kf - 1.0),
        theta_c3,
        theta_star2,
    })
}

/// A `q`-height-periodic constant boundary law, stored as its `q` class
/// values `l(0), ..., l(q-1)`.
///
/// Laws produced for periods 3 and 4 have `l(0) = 1`. The two-class system
/// treats both class values as unknowns, so class 0 is not forced to 1 here;
/// [`PeriodicLaw::normalized`] rescales when a unit class-0 entry is needed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicLaw {
    values: Vec<f64>,
}

impl PeriodicLaw {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain(format!(
                "period {} must be at least 2",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!(
                "law value {v} is not positive and finite"
            )));
        }
        Ok(Self { values })
    }

    /// The all-ones law of period `q`.
    pub fn ones(q: usize) -> Result<Self> {
        Self::new(vec![1.0; q])
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value of the class of height `i`.
    pub fn value(&self, i: i64) -> f64 {
        self.values[i.rem_euclid(self.values.len() as i64) as usize]
    }

    pub fn is_normalized(&self) -> bool {
        self.values[0] == 1.0
    }

    /// Rescaled so that class 0 carries the value 1.
    pub fn normalized(&self) -> Self {
        let v0 = self.values[0];
        Self {
            values: self.values.iter().map(|v| v / v0).collect(),
        }
    }

    /// The law `i -> l(i + r)`, without rescaling.
    pub fn shifted(&self, r: i64) -> Self {
        let q = self.values.len() as i64;
        Self {
            values: (0..q).map(|i| self.value(i + r)).collect(),
        }
    }

    /// Relative max-norm distance between two laws of the same period.
    pub fn distance(&self, other: &Self) -> f64 {
        relative_distance(&self.values, &other.values)
    }
}

/// Relative max-norm distance `max_i |a_i - b_i| / max(|a_i|, |b_i|)`.
pub fn relative_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Right-hand side of the constant boundary-law equation for every class:
/// `((theta z_i + z_{i-1} + z_{i+1}) / (theta + z_{-1} + z_1))^k`.
pub fn boundary_law_rhs(law: &PeriodicLaw, params: &ModelParams) -> Result<Vec<f64>> {
    let theta = params.theta();
    let k = params.k() as i32;
    let denom = theta + law.value(-1) + law.value(1);
    (0..law.period() as i64)
        .map(|i| {
            let num = theta * law.value(i) + law.value(i - 1) + law.value(i + 1);
            let rhs = (num / denom).powi(k);
            if rhs.is_finite() {
                Ok(rhs)
            } else {
                Err(Error::Numeric(format!(
                    "non-finite right-hand side at class {i}"
                )))
            }
        })
        .collect()
}

/// Max over classes of `|z_i - rhs_i|`.
pub fn boundary_law_residual(law: &PeriodicLaw, params: &ModelParams) -> Result<f64> {
    let rhs = boundary_law_rhs(law, params)?;
    let r = law
        .values()
        .iter()
        .zip(&rhs)
        .map(|(z, r)| (z - r).abs())
        .fold(0.0, f64::max);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Numeric("non-finite residual".into()))
    }
}

/// All `q` cyclic height shifts of `law`, each renormalised to a unit
/// class-0 entry. Shifts that coincide are reported once.
pub fn cyclic_shift_orbit(law: &PeriodicLaw) -> Vec<PeriodicLaw> {
    let mut orbit: Vec<PeriodicLaw> = Vec::with_capacity(law.period());
    for r in 0..law.period() as i64 {
        let member = law.shifted(r).normalized();
        if !orbit.iter().any(|m| m.distance(&member) <= 1e-12) {
            orbit.push(member);
        }
    }
    orbit
}

/// Which classes of a period carry the unknowns `x`, `y` and which are pinned
/// to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    One,
    X,
    Y,
}

/// The two-unknown solution patterns studied for each period:
/// `(x, y)` for period 2, `(1, x, y)` for period 3, `(1, x, 1, y)` for period 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightPattern {
    slots: Vec<Slot>,
}

impl HeightPattern {
    pub fn for_period(q: usize) -> Result<Self> {
        let slots = match q {
            2 => vec![Slot::X, Slot::Y],
            3 => vec![Slot::One, Slot::X, Slot::Y],
            4 => vec![Slot::One, Slot::X, Slot::One, Slot::Y],
            _ => {
                return Err(Error::Unsupported(format!(
                    "no solution pattern for period {q}"
                )))
            }
        };
        Ok(Self { slots })
    }

    pub fn period(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Assemble the law for unknowns `(x, y)`.
    pub fn law(&self, x: f64, y: f64) -> Result<PeriodicLaw> {
        PeriodicLaw::new(
            self.slots
                .iter()
                .map(|s| match s {
                    Slot::One => 1.0,
                    Slot::X => x,
                    Slot::Y => y,
                })
                .collect(),
        )
    }

    /// Read `(x, y)` back from a law that fits this pattern.
    pub fn coordinates(&self, law: &PeriodicLaw) -> Option<(f64, f64)> {
        if law.period() != self.period() {
            return None;
        }
        let (mut x, mut y) = (None, None);
        for (s, v) in self.slots.iter().zip(law.values()) {
            match s {
                Slot::One if (v - 1.0).abs() > DEDUP_TOL => return None,
                Slot::One => {}
                Slot::X => x = Some(*v),
                Slot::Y => y = Some(*v),
            }
        }
        Some((x?, y?))
    }
}
