//! Enumeration of the constant `q`-periodic boundary laws for `q = 2, 3, 4`
//! and the measure counts built on them.
//!
//! Each period works in the two-unknown pattern of [`HeightPattern`]:
//! period 2 reduces to polynomial root problems, period 3 is solved by a
//! deterministic multistart Newton search, and period 4 reuses the period-2
//! root finder on its symmetric line and closed-form quadratics (k = 2) off it.

mod count;
pub mod period2;
pub mod period3;
pub mod period4;

use serde::Serialize;

use crate::model::{boundary_law_residual, HeightPattern, ModelParams, PeriodicLaw, RESIDUAL_TOL};
use crate::{Error, Result};

pub use count::{
    census, p2_count, p3_count, p3_count_with, p4_count, period_count, phase_count, Census,
    PeriodCount, PhaseCount, Threshold,
};
pub use period2::{p2_solve, p2_solve_diagonal, p2_solve_offdiagonal, p2_solve_x_eq_1, tau_roots};
pub use period3::{p3_find_theta_c1, p3_solve, Period3Solutions, ThetaC1Bracket};
pub use period4::{p4_discriminant, p4_phi, p4_solve, p4_solve_asymmetric, p4_solve_symmetric};

/// Which reduction produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// The all-ones law.
    Trivial,
    /// `x = 1`, `y != 1`.
    XEq1,
    /// `y = 1`, `x != 1` (period 3).
    YEq1,
    /// `x = y != 1`.
    Diagonal,
    /// Period 2, `y = tau2^k x` with `tau2 > 1` the larger root of the tau polynomial.
    OffdiagTau1,
    /// Period 2, `y = tau1^k x` with `tau1 = 1 / tau2 < 1`.
    OffdiagTau2,
    /// Period 4 (k = 2), `x + y = phi1(theta)`.
    AsymPhi1,
    /// Period 4 (k = 2), `x + y = phi2(theta)`.
    AsymPhi2,
    /// A converged point that fits none of the patterns above.
    Unclassified,
}

impl CaseTag {
    pub const ALL: [CaseTag; 9] = [
        CaseTag::Trivial,
        CaseTag::XEq1,
        CaseTag::YEq1,
        CaseTag::Diagonal,
        CaseTag::OffdiagTau1,
        CaseTag::OffdiagTau2,
        CaseTag::AsymPhi1,
        CaseTag::AsymPhi2,
        CaseTag::Unclassified,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::Trivial => "trivial",
            CaseTag::XEq1 => "x_eq_1",
            CaseTag::YEq1 => "y_eq_1",
            CaseTag::Diagonal => "diagonal",
            CaseTag::OffdiagTau1 => "offdiag_tau1",
            CaseTag::OffdiagTau2 => "offdiag_tau2",
            CaseTag::AsymPhi1 => "asym_phi1",
            CaseTag::AsymPhi2 => "asym_phi2",
            CaseTag::Unclassified => "unclassified",
        }
    }
}

/// One solution `(x, y)` of a period's pattern, with its assembled law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionBranch {
    pub q: usize,
    pub k: u32,
    pub theta: f64,
    pub case: CaseTag,
    /// Unique within one solve: the case tag, suffixed with `-i` when the
    /// tag occurs more than once (ordered by `y`, then `x`).
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub law: PeriodicLaw,
    pub residual: f64,
    /// Multiplicity of the underlying polynomial root (1 unless degenerate).
    pub multiplicity: u32,
}

impl SolutionBranch {
    pub fn new(
        q: usize,
        case: CaseTag,
        x: f64,
        y: f64,
        params: &ModelParams,
        multiplicity: u32,
    ) -> Result<Self> {
        let law = HeightPattern::for_period(q)?.law(x, y)?;
        let residual = boundary_law_residual(&law, params)?;
        Ok(Self {
            q,
            k: params.k(),
            theta: params.theta(),
            case,
            label: case.as_str().to_string(),
            x,
            y,
            law,
            residual,
            multiplicity,
        })
    }

    pub fn is_exact(&self) -> bool {
        self.residual < RESIDUAL_TOL
    }
}

/// Sort by case tag, then `y`, then `x`, and assign unique labels.
pub(crate) fn finish(mut branches: Vec<SolutionBranch>) -> Vec<SolutionBranch> {
    branches.sort_by(|a, b| {
        a.case
            .cmp(&b.case)
            .then(a.y.total_cmp(&b.y))
            .then(a.x.total_cmp(&b.x))
    });
    for tag in CaseTag::ALL {
        let n = branches.iter().filter(|b| b.case == tag).count();
        if n > 1 {
            for (i, b) in branches.iter_mut().filter(|b| b.case == tag).enumerate() {
                b.label = format!("{}-{}", tag.as_str(), i);
            }
        }
    }
    branches
}

/// Every branch of period `q` at `params`.
pub fn solve(q: usize, params: &ModelParams) -> Result<Vec<SolutionBranch>> {
    match q {
        2 => p2_solve(params),
        3 => Ok(p3_solve(params)?.branches),
        4 => p4_solve(params),
        _ => Err(Error::Unsupported(format!(
            "period {q} has no branch solver"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_unique_and_ordered() {
        let p = ModelParams::new(2, 7.0).unwrap();
        let b = p2_solve(&p).unwrap();
        let labels: Vec<&str> = b.iter().map(|b| b.label.as_str()).collect();
        assert_eq!(
            labels,
            vec![
                "trivial",
                "x_eq_1-0",
                "x_eq_1-1",
                "diagonal",
                "offdiag_tau1",
                "offdiag_tau2"
            ]
        );
    }

    #[test]
    fn unsupported_period() {
        let p = ModelParams::new(2, 7.0).unwrap();
        assert!(matches!(solve(5, &p), Err(Error::Unsupported(_))));
    }
}
