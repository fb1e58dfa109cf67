//! Theta sweeps as plot-ready CSV.
//!
//! Each period has a fixed set of branch slots. A row holds `theta`, the
//! counts, and the `(x, y)` of every slot, with empty cells where a branch
//! does not exist at that `theta`.

use std::io::Write;

use rayon::prelude::*;

use crate::branches::{period_count, solve, CaseTag, SolutionBranch};
use crate::model::ModelParams;
use crate::{Error, Result};

pub const SWEEP_SCHEMA: &str = "sos-ggm/sweep/1";

/// Branch slots of a period: a case tag and its index among branches of
/// that tag, in the solver's order.
pub fn slots(q: usize) -> Result<Vec<(CaseTag, usize)>> {
    use CaseTag::*;
    Ok(match q {
        2 => vec![
            (Trivial, 0),
            (XEq1, 0),
            (XEq1, 1),
            (Diagonal, 0),
            (OffdiagTau1, 0),
            (OffdiagTau2, 0),
        ],
        3 => vec![
            (Trivial, 0),
            (XEq1, 0),
            (XEq1, 1),
            (YEq1, 0),
            (YEq1, 1),
            (Diagonal, 0),
            (Diagonal, 1),
        ],
        4 => vec![
            (Trivial, 0),
            (Diagonal, 0),
            (Diagonal, 1),
            (AsymPhi1, 0),
            (AsymPhi1, 1),
            (AsymPhi2, 0),
            (AsymPhi2, 1),
        ],
        _ => {
            return Err(Error::Unsupported(format!(
                "period {q} has no sweep layout"
            )))
        }
    })
}

fn slot_name(tag: CaseTag, i: usize, q: usize) -> String {
    let slots = slots(q).unwrap_or_default();
    if slots.iter().filter(|(t, _)| *t == tag).count() > 1 {
        format!("{}_{}", tag.as_str(), i)
    } else {
        tag.as_str().to_string()
    }
}

/// `min + i (max - min) / (steps - 1)` for `i in 0..steps`.
pub fn theta_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && min.is_finite() && max.is_finite()) {
        return Err(Error::Domain(format!(
            "theta range [{min}, {max}] must be positive and finite"
        )));
    }
    if !(max > min) && steps > 1 {
        return Err(Error::Domain(format!(
            "theta max {max} must exceed min {min}"
        )));
    }
    if steps < 2 {
        return Err(Error::Domain(format!("steps = {steps} must be at least 2")));
    }
    let span = max - min;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                max
            } else {
                min + i as f64 * span / (steps - 1) as f64
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub nu: usize,
    pub census: usize,
    pub raw: usize,
    /// `(x, y)` per slot of [`slots`].
    pub cells: Vec<Option<(f64, f64)>>,
}

impl SweepRow {
    fn new(q: usize, params: &ModelParams) -> Result<Self> {
        let branches = solve(q, params)?;
        let count = period_count(q, params)?;
        let cells = slots(q)?
            .into_iter()
            .map(|(tag, i)| {
                branches
                    .iter()
                    .filter(|b: &&SolutionBranch| b.case == tag)
                    .nth(i)
                    .map(|b| (b.x, b.y))
            })
            .collect();
        Ok(Self {
            theta: params.theta(),
            nu: count.nu,
            census: count.census.identified,
            raw: count.census.raw,
            cells,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub q: usize,
    pub k: u32,
    pub rows: Vec<SweepRow>,
}

impl Sweep {
    pub fn columns(&self) -> Vec<String> {
        let mut c = vec![
            "theta".to_string(),
            "nu".into(),
            "census".into(),
            "raw".into(),
        ];
        for (tag, i) in slots(self.q).unwrap_or_default() {
            let name = slot_name(tag, i, self.q);
            c.push(format!("{name}_x"));
            c.push(format!("{name}_y"));
        }
        c
    }

    /// Index of the slot for `tag` and occurrence `i`.
    pub fn slot_index(&self, tag: CaseTag, i: usize) -> Option<usize> {
        slots(self.q).ok()?.iter().position(|s| *s == (tag, i))
    }

    /// Write CSV with `#` header comments. `stamp` adds a version line.
    pub fn write_csv(&self, w: &mut dyn Write, stamp: bool) -> Result<()> {
        writeln!(w, "# schema: {SWEEP_SCHEMA}")?;
        if stamp {
            writeln!(w, "# version: sos-ggm {}", env!("CARGO_PKG_VERSION"))?;
        }
        writeln!(
            w,
            "# q = {}, k = {}, rows = {}",
            self.q,
            self.k,
            self.rows.len()
        )?;
        writeln!(w, "# theta: grid point min + i (max - min) / (steps - 1)")?;
        writeln!(
            w,
            "# nu: measure count; exact-threshold value on critical points"
        )?;
        writeln!(
            w,
            "# census: numerically identified count; raw: distinct solutions"
        )?;
        writeln!(
            w,
            "# <branch>_x, <branch>_y: solution coordinates; empty when the branch is absent"
        )?;
        writeln!(w, "{}", self.columns().join(","))?;
        for r in &self.rows {
            let mut line = format!("{},{},{},{}", r.theta, r.nu, r.census, r.raw);
            for c in &r.cells {
                match c {
                    Some((x, y)) => line.push_str(&format!(",{x},{y}")),
                    None => line.push_str(",,"),
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Solve and count at every grid point, in parallel, rows in grid order.
pub fn sweep(q: usize, k: u32, grid: &[f64]) -> Result<Sweep> {
    slots(q)?;
    let rows = grid
        .par_iter()
        .map(|&t| SweepRow::new(q, &ModelParams::new(k, t)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { q, k, rows })
}
