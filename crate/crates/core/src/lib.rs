//! Height-periodic boundary laws and gradient Gibbs measures for the
//! solid-on-solid model with alternating magnetism on Cayley trees.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: parameters, the transfer kernel, critical constants and the
//!   boundary-law residual.
//! - [`poly`]: positive-root enumeration for the univariate polynomial
//!   families that the period-2 and period-4 reductions produce.
//! - [`branches`]: closed-form and numerical enumeration of the period-2,
//!   period-3 and period-4 solutions, and the resulting measure counts.
//! - [`measure`]: pinned and mixed gradient measures on finite subtrees,
//!   with an exact consistency check.
//! - [`oracle`]: an independent multistart Newton solver that only knows the
//!   boundary-law equation, used to cross-check [`branches`].
//! - [`cli`], [`sweep`], [`verify`]: the command-line front end and the data
//!   it emits.

// `!(a < b)` reads as "not strictly ordered", NaN included.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branches;
pub mod cli;
mod error;
mod json;
pub mod measure;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use model::{CriticalConstants, HeightPattern, ModelParams, PeriodicLaw};
