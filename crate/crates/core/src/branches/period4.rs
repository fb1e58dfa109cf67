//! Period 4 in the pattern `(1, x, 1, y)`:
//!
//! ```text
//! x = ((theta x + 2) / (theta + x + y))^k
//! y = ((theta y + 2) / (theta + x + y))^k
//! ```
//!
//! On the line `x = y` this is the `x = 1` equation of period 2. Off the line
//! (k = 2 only) `x + y` is one of two closed-form roots `phi1`, `phi2` and
//! `xy = 4 / theta^2`.

use crate::model::{ModelParams, DEDUP_TOL};
use crate::{Error, Result};

use super::period2::x_eq_1_roots;
use super::{finish, CaseTag, SolutionBranch};

/// `(1, 1)` plus `(r, r)` for every nontrivial root `r` of the period-2
/// `x = 1` equation.
pub fn p4_solve_symmetric(params: &ModelParams) -> Result<Vec<SolutionBranch>> {
    let mut out = vec![SolutionBranch::new(
        4,
        CaseTag::Trivial,
        1.0,
        1.0,
        params,
        1,
    )?];
    for r in x_eq_1_roots(params)?.roots() {
        out.push(SolutionBranch::new(
            4,
            CaseTag::Diagonal,
            r.value,
            r.value,
            params,
            r.multiplicity,
        )?);
    }
    Ok(finish(out))
}

/// `D = theta (theta^3 - 4 theta^2 + 16)`.
pub fn p4_discriminant(theta: f64) -> f64 {
    theta * (theta.powi(3) - 4.0 * theta * theta + 16.0)
}

/// `(phi1, phi2) = (theta^2 - 2 theta +- sqrt(D)) / 2`.
pub fn p4_phi(theta: f64) -> (f64, f64) {
    let base = theta * theta - 2.0 * theta;
    let root = p4_discriminant(theta).sqrt();
    (0.5 * (base + root), 0.5 * (base - root))
}

/// Off-diagonal solutions for k = 2, in swap-symmetric pairs.
///
/// The first pair (sum `phi1`) exists for `theta > 2`, the second (sum
/// `phi2`) for `theta > theta_c^(3)`. A pair whose two roots coincide lies
/// on the diagonal and is not reported here.
pub fn p4_solve_asymmetric(params: &ModelParams) -> Result<Vec<SolutionBranch>> {
    if params.k() != 2 {
        return Err(Error::Unsupported(format!(
            "asymmetric period-4 solutions are closed-form only for k = 2, got k = {}",
            params.k()
        )));
    }
    let theta = params.theta();
    let product = 4.0 / (theta * theta);
    let (phi1, phi2) = p4_phi(theta);
    let mut out = Vec::new();
    for (sum, tag) in [(phi1, CaseTag::AsymPhi1), (phi2, CaseTag::AsymPhi2)] {
        if !(sum > 0.0) {
            continue;
        }
        let disc = sum * sum - 4.0 * product;
        if !(disc > 0.0) {
            continue;
        }
        let big = 0.5 * (sum + disc.sqrt());
        let small = product / big;
        if (big - small) <= DEDUP_TOL * big {
            continue;
        }
        out.push(SolutionBranch::new(4, tag, big, small, params, 1)?);
        out.push(SolutionBranch::new(4, tag, small, big, params, 1)?);
    }
    Ok(finish(out))
}

/// Every period-4 branch; off-diagonal ones only for k = 2.
pub fn p4_solve(params: &ModelParams) -> Result<Vec<SolutionBranch>> {
    let mut out = p4_solve_symmetric(params)?;
    if params.k() == 2 {
        out.extend(p4_solve_asymmetric(params)?);
    }
    Ok(finish(out))
}
