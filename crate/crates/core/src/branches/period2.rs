//! Period 2: the system
//!
//! ```text
//! x = ((theta x + 2y) / (theta + 2y))^k
//! y = ((theta y + 2x) / (theta + 2y))^k
//! ```
//!
//! split into the cases `x = 1`, `x = y` and `x != y`. Every case ends in a
//! univariate polynomial handled by [`positive_roots`].

use crate::model::{ModelParams, THRESHOLD_TOL};
use crate::poly::{
    deflate, mul_coeffs, positive_roots, pow_coeffs, sub_coeffs, Polynomial, RootSet,
};
use crate::Result;

use super::{finish, CaseTag, SolutionBranch};

/// `y (theta + 2y)^k - (theta y + 2)^k` divided by its root `y - 1`.
///
/// Positive roots are the nontrivial solutions of
/// `y = ((theta y + 2) / (theta + 2y))^k`; they come in reciprocal pairs.
pub(crate) fn x_eq_1_quotient(params: &ModelParams) -> Result<Polynomial> {
    let theta = params.theta();
    let k = params.k();
    let lhs = mul_coeffs(&[0.0, 1.0], &pow_coeffs(&[theta, 2.0], k));
    let rhs = pow_coeffs(&[2.0, theta], k);
    let (quotient, _) = deflate(&sub_coeffs(&lhs, &rhs), 1.0);
    Polynomial::new(quotient)
}

/// Nontrivial positive roots of the `x = 1` equation, with multiplicities.
pub(crate) fn x_eq_1_roots(params: &ModelParams) -> Result<RootSet> {
    positive_roots(&x_eq_1_quotient(params)?, None)
}

/// Solutions `(1, y)`: always `(1, 1)`, plus the nontrivial roots.
///
/// At `theta = theta_c` the nontrivial roots merge into `y = 1` and are
/// returned as one `x_eq_1` branch of multiplicity 2 sitting on the trivial
/// one.
pub fn p2_solve_x_eq_1(params: &ModelParams) -> Result<Vec<SolutionBranch>> {
    let mut out = vec![SolutionBranch::new(
        2,
        CaseTag::Trivial,
        1.0,
        1.0,
        params,
        1,
    )?];
    for r in x_eq_1_roots(params)?.roots() {
        out.push(SolutionBranch::new(
            2,
            CaseTag::XEq1,
            1.0,
            r.value,
            params,
            r.multiplicity,
        )?);
    }
    Ok(finish(out))
}

/// `2 c s^{k-1} - theta (s^{k-2} + ... + s + 1)`, which has exactly one
/// positive root for every `c, theta > 0`.
fn single_sign_change(c: f64, params: &ModelParams) -> Result<Polynomial> {
    let mut coeffs = vec![-params.theta(); params.k() as usize - 1];
    coeffs.push(2.0 * c);
    Polynomial::new(coeffs)
}

fn unique_positive_root(p: &Polynomial) -> Result<f64> {
    let roots = positive_roots(p, None)?;
    match roots.roots() {
        [r] => Ok(r.value),
        other => Err(crate::Error::Internal(format!(
            "expected one positive root, found {}",
            other.len()
        ))),
    }
}

/// The diagonal branch `(x1, x1)`, `x1 = s^k`, absent at `theta = 2/(k-1)`
/// where `s = 1`.
pub fn p2_solve_diagonal(params: &ModelParams) -> Result<Option<SolutionBranch>> {
    let s = unique_positive_root(&single_sign_change(1.0, params)?)?;
    if (s - 1.0).abs() <= THRESHOLD_TOL {
        return Ok(None);
    }
    let x = s.powi(params.k() as i32);
    Ok(Some(SolutionBranch::new(
        2,
        CaseTag::Diagonal,
        x,
        x,
        params,
        1,
    )?))
}

/// `2 tau^k + (2 - theta)(tau^{k-1} + ... + tau) + 2`.
pub fn tau_polynomial(params: &ModelParams) -> Result<Polynomial> {
    let k = params.k() as usize;
    let mut coeffs = vec![2.0 - params.theta(); k + 1];
    coeffs[0] = 2.0;
    coeffs[k] = 2.0;
    Polynomial::new(coeffs)
}

/// Positive roots of the tau polynomial: none below `theta_c`, the double
/// root 1 at `theta_c`, a reciprocal pair above.
pub fn tau_roots(params: &ModelParams) -> Result<RootSet> {
    positive_roots(&tau_polynomial(params)?, None)
}

/// The two off-diagonal branches, present for `theta > theta_c`.
///
/// For each tau root `t != 1`, `y = t^k x` and `x = h^k` with `h` the unique
/// positive root of `2 t^k h^{k-1} - theta (h^{k-2} + ... + 1)`.
pub fn p2_solve_offdiagonal(params: &ModelParams) -> Result<Vec<SolutionBranch>> {
    let k = params.k() as i32;
    let mut out = Vec::new();
    for t in tau_roots(params)?.roots() {
        // tau = 1 reproduces the diagonal branch
        if (t.value - 1.0).abs() <= THRESHOLD_TOL {
            continue;
        }
        let ratio = t.value.powi(k);
        let h = unique_positive_root(&single_sign_change(ratio, params)?)?;
        let (x, y) = polish(h.powi(k), ratio * h.powi(k), params);
        let tag = if t.value > 1.0 {
            CaseTag::OffdiagTau1
        } else {
            CaseTag::OffdiagTau2
        };
        out.push(SolutionBranch::new(2, tag, x, y, params, t.multiplicity)?);
    }
    Ok(finish(out))
}

/// `(x - A^k, y - B^k)` with `A = (theta x + 2y) / (theta + 2y)`,
/// `B = (theta y + 2x) / (theta + 2y)`, and its Jacobian.
fn system(x: f64, y: f64, params: &ModelParams) -> ([f64; 2], [[f64; 2]; 2]) {
    let theta = params.theta();
    let k = params.k() as i32;
    let kf = k as f64;
    let d = theta + 2.0 * y;
    let a = (theta * x + 2.0 * y) / d;
    let b = (theta * y + 2.0 * x) / d;
    let (ak, bk) = (a.powi(k), b.powi(k));
    let (dak, dbk) = (kf * a.powi(k - 1), kf * b.powi(k - 1));
    // dA/dx, dA/dy, dB/dx, dB/dy
    let (ax, ay) = (theta / d, (2.0 * d - 2.0 * (theta * x + 2.0 * y)) / (d * d));
    let (bx, by) = (2.0 / d, (theta * d - 2.0 * (theta * y + 2.0 * x)) / (d * d));
    (
        [x - ak, y - bk],
        [[1.0 - dak * ax, -dak * ay], [-dbk * bx, 1.0 - dbk * by]],
    )
}

/// A few Newton steps on the period-2 system, each kept only if it lowers
/// the residual. Large off-diagonal values lose digits through the chain
/// `tau -> h -> h^k`.
fn polish(mut x: f64, mut y: f64, params: &ModelParams) -> (f64, f64) {
    let norm = |f: [f64; 2]| f[0].abs().max(f[1].abs());
    let (mut f, mut j) = system(x, y, params);
    for _ in 0..4 {
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let dy = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        let (nx, ny) = (x - dx, y - dy);
        if !(nx > 0.0 && ny > 0.0) {
            break;
        }
        let (nf, nj) = system(nx, ny, params);
        if norm(nf) >= norm(f) {
            break;
        }
        (x, y, f, j) = (nx, ny, nf, nj);
    }
    (x, y)
}

/// Every period-2 branch.
pub fn p2_solve(params: &ModelParams) -> Result<Vec<SolutionBranch>> {
    let mut out = p2_solve_x_eq_1(params)?;
    out.extend(p2_solve_diagonal(params)?);
    out.extend(p2_solve_offdiagonal(params)?);
    Ok(finish(out))
}
