//! Pinned and mixed gradient measures on finite subtrees.
//!
//! A finite volume is a rooted subtree of depth `n`. Every gradient
//! configuration `zeta` in `{-1, 0, 1}^edges` gets the weight
//!
//! ```text
//! prod_b Q(zeta_b) * sum_{s in pins} prod_{y boundary} l(s + h(y))
//! ```
//!
//! where `h(y)` sums `zeta` along the path from the root to `y`. A pinned
//! measure uses one residue class `s`, the mixed one sums over all of them.
//! All `3^edges` configurations are enumerated, so the tables are exact.

use rayon::prelude::*;
use serde::Serialize;

use crate::json::{sig17_vec, Sig17};
use crate::model::{transfer_weight, ModelParams, PeriodicLaw};
use crate::{Error, Result};

/// Largest supported edge count: `3^15` configurations.
pub const ENUMERATION_CAP_EXPONENT: u32 = 15;

pub const MARGINAL_SCHEMA: &str = "sos-ggm/marginal/1";

/// A rooted subtree with vertices and edges in breadth-first order.
///
/// Vertex 0 is the root; edge `i` joins `parent[i]` to vertex `i + 1`. In the
/// full-tree convention the root has `k + 1` children, in the half-tree one
/// it has `k`. Every other internal vertex has `k` children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSubtree {
    k: u32,
    depth: usize,
    half: bool,
    parents: Vec<usize>,
    boundary: Vec<usize>,
}

impl FiniteSubtree {
    pub fn new(k: u32, depth: usize) -> Result<Self> {
        Self::build(k, depth, false)
    }

    pub fn half_tree(k: u32, depth: usize) -> Result<Self> {
        Self::build(k, depth, true)
    }

    fn build(k: u32, depth: usize, half: bool) -> Result<Self> {
        if k < 1 {
            return Err(Error::Domain(format!("arity {k} must be positive")));
        }
        if depth < 1 {
            return Err(Error::Domain("subtree depth must be at least 1".into()));
        }
        // refuse trees far beyond the enumeration cap before building them
        let mut edges = 0u64;
        let mut width = 1u64;
        for d in 0..depth {
            width = width.saturating_mul(if d == 0 && !half { k + 1 } else { k } as u64);
            edges = edges.saturating_add(width);
        }
        if edges > 64 {
            return Err(Error::SizeCap {
                edges: usize::try_from(edges).unwrap_or(usize::MAX),
                cap_exponent: ENUMERATION_CAP_EXPONENT,
            });
        }
        let mut parents = Vec::new();
        let mut level = vec![0usize];
        for d in 0..depth {
            let children = if d == 0 && !half { k + 1 } else { k } as usize;
            let mut next = Vec::with_capacity(level.len() * children);
            for &v in &level {
                for _ in 0..children {
                    parents.push(v);
                    next.push(parents.len());
                }
            }
            level = next;
        }
        Ok(Self {
            k,
            depth,
            half,
            parents,
            boundary: level,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_half_tree(&self) -> bool {
        self.half
    }

    pub fn edge_count(&self) -> usize {
        self.parents.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.parents.len() + 1
    }

    /// `(parent, child)` pairs, oriented away from the root.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i + 1))
            .collect()
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Whether `self` is the same-rooted subtree formed by the first levels
    /// of `other`; then its edges are a prefix of `other`'s edges.
    pub fn is_nested_in(&self, other: &Self) -> bool {
        self.k == other.k && self.half == other.half && self.depth <= other.depth
    }

    fn check_cap(&self) -> Result<()> {
        if self.edge_count() > ENUMERATION_CAP_EXPONENT as usize {
            return Err(Error::SizeCap {
                edges: self.edge_count(),
                cap_exponent: ENUMERATION_CAP_EXPONENT,
            });
        }
        Ok(())
    }
}

/// Which measure to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pin {
    Class(usize),
    Mixed,
}

impl Pin {
    fn classes(&self, q: usize) -> Result<Vec<i64>> {
        match *self {
            Pin::Class(s) if s < q => Ok(vec![s as i64]),
            Pin::Class(s) => Err(Error::Domain(format!(
                "pin class {s} is not below the period {q}"
            ))),
            Pin::Mixed => Ok((0..q as i64).collect()),
        }
    }
}

/// Probability table over all gradient configurations of a subtree.
///
/// Configuration `i` assigns edge `e` the gradient `d_e - 1`, where `d_e` is
/// the `e`-th base-3 digit of `i` counted from the most significant one. A
/// nested subtree's configurations are therefore the prefixes of the larger
/// tree's.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientMarginal {
    pub edges: Vec<(usize, usize)>,
    pub theta: f64,
    pub law: PeriodicLaw,
    pub pin: Pin,
    pub probs: Vec<f64>,
}

impl GradientMarginal {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The gradient configuration of table row `index`.
    pub fn zeta(&self, index: usize) -> Vec<i8> {
        decode(index, self.edges.len())
    }

    pub fn total(&self) -> f64 {
        compensated_sum(&self.probs)
    }

    /// Sum out every edge after the first `edges`.
    pub fn restrict(&self, edges: usize) -> Result<Vec<f64>> {
        if edges > self.edges.len() {
            return Err(Error::Domain(format!(
                "cannot restrict {} edges to {edges}",
                self.edges.len()
            )));
        }
        let block = 3usize.pow((self.edges.len() - edges) as u32);
        Ok(self.probs.chunks(block).map(compensated_sum).collect())
    }

    pub fn to_json(&self) -> MarginalJson {
        MarginalJson {
            schema: MARGINAL_SCHEMA,
            edges: self.edges.clone(),
            theta: Sig17(self.theta),
            q: self.law.period(),
            law: sig17_vec(self.law.values()),
            pin: match self.pin {
                Pin::Class(s) => Some(s),
                Pin::Mixed => None,
            },
            table: self
                .probs
                .iter()
                .enumerate()
                .map(|(i, &p)| TableRow {
                    zeta: self.zeta(i),
                    p: Sig17(p),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub zeta: Vec<i8>,
    pub p: Sig17,
}

/// Serialized form of a [`GradientMarginal`].
#[derive(Debug, Serialize)]
pub struct MarginalJson {
    pub schema: &'static str,
    pub edges: Vec<(usize, usize)>,
    pub theta: Sig17,
    pub q: usize,
    pub law: Vec<Sig17>,
    pub pin: Option<usize>,
    pub table: Vec<TableRow>,
}

/// Neumaier summation; tables have up to `3^15` entries.
fn compensated_sum(values: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn decode(mut index: usize, edges: usize) -> Vec<i8> {
    let mut zeta = vec![0i8; edges];
    for z in zeta.iter_mut().rev() {
        *z = (index % 3) as i8 - 1;
        index /= 3;
    }
    zeta
}

fn build(
    law: &PeriodicLaw,
    tree: &FiniteSubtree,
    pin: Pin,
    params: &ModelParams,
) -> Result<GradientMarginal> {
    tree.check_cap()?;
    if tree.k() != params.k() {
        return Err(Error::Domain(format!(
            "tree arity {} differs from k = {}",
            tree.k(),
            params.k()
        )));
    }
    let classes = pin.classes(law.period())?;
    let edges = tree.edge_count();
    let parents = &tree.parents;
    let boundary = tree.boundary();
    let kernel = [
        transfer_weight(-1, params),
        transfer_weight(0, params),
        transfer_weight(1, params),
    ];

    let weight = |index: usize| -> f64 {
        let zeta = decode(index, edges);
        let mut height = vec![0i64; edges + 1];
        for (e, &p) in parents.iter().enumerate() {
            height[e + 1] = height[p] + zeta[e] as i64;
        }
        let bond: f64 = zeta.iter().map(|&z| kernel[(z + 1) as usize]).product();
        let pins: f64 = classes
            .iter()
            .map(|&s| {
                boundary
                    .iter()
                    .map(|&y| law.value(s + height[y]))
                    .product::<f64>()
            })
            .sum();
        bond * pins
    };

    let n = 3usize.pow(edges as u32);
    // at most 15 edges: direct products stay far inside double range
    let mut w: Vec<f64> = (0..n).into_par_iter().map(weight).collect();
    let total = compensated_sum(&w);
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Numeric(format!(
            "total weight {total} cannot be normalized"
        )));
    }
    for v in w.iter_mut() {
        *v /= total;
    }
    Ok(GradientMarginal {
        edges: tree.edges(),
        theta: params.theta(),
        law: law.clone(),
        pin,
        probs: w,
    })
}

/// The measure pinned at residue class `s` of the root.
pub fn pinned_marginal(
    law: &PeriodicLaw,
    tree: &FiniteSubtree,
    s: usize,
    params: &ModelParams,
) -> Result<GradientMarginal> {
    build(law, tree, Pin::Class(s), params)
}

/// The measure summed over all root classes.
pub fn mixed_marginal(
    law: &PeriodicLaw,
    tree: &FiniteSubtree,
    params: &ModelParams,
) -> Result<GradientMarginal> {
    build(law, tree, Pin::Mixed, params)
}

pub fn marginal(
    law: &PeriodicLaw,
    tree: &FiniteSubtree,
    pin: Pin,
    params: &ModelParams,
) -> Result<GradientMarginal> {
    build(law, tree, pin, params)
}

/// Max absolute difference between the `small` table and the `large` table
/// summed down to `small`'s edges.
pub fn check_consistency(
    law: &PeriodicLaw,
    small: &FiniteSubtree,
    large: &FiniteSubtree,
    params: &ModelParams,
    pin: Pin,
) -> Result<f64> {
    if !small.is_nested_in(large) {
        return Err(Error::Domain(
            "the smaller subtree is not nested in the larger one".into(),
        ));
    }
    let direct = build(law, small, pin, params)?;
    let summed = build(law, large, pin, params)?.restrict(small.edge_count())?;
    Ok(direct
        .probs
        .iter()
        .zip(&summed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Per-edge distribution of the gradient, as `[P(-1), P(0), P(+1)]`.
pub fn edge_gradient_distribution(m: &GradientMarginal) -> Vec<[f64; 3]> {
    let edges = m.edge_count();
    let mut out = vec![[0.0; 3]; edges];
    for (i, &p) in m.probs.iter().enumerate() {
        for (e, z) in decode(i, edges).into_iter().enumerate() {
            out[e][(z + 1) as usize] += p;
        }
    }
    out
}
