//! Dual averaging for smooth nonconvex finite sums over compact convex sets.
//!
//! The library provides two optimization engines and the infrastructure they
//! share:
//!
//! * [`cda`] — centralized dual averaging: a single node accumulates gradients
//!   of the averaged objective in a dual vector and maps it back to the
//!   feasible set through a quadratic proximal function.
//! * [`dda`] — distributed dual averaging: `n` agents, each holding one
//!   summand of the objective, mix dual vectors and gradient-tracking vectors
//!   over a random doubly stochastic network every round. A distributed
//!   projected-gradient baseline is included for comparison.
//! * [`network`] — random mixing-matrix models (Bernoulli edge activation,
//!   pairwise gossip, perfect averaging, fixed matrices), a Monte Carlo
//!   estimator for the network contraction factor, and a step-size
//!   certification routine built on it.
//! * [`objective`] — finite-sum objective families (projection-style
//!   "negative squared norm" instances and quadratics), Lipschitz-constant
//!   estimation, and JSON (de)serialization of instances.
//! * [`sets`], [`prox`] — feasible sets (ball, box, whole space) with
//!   projections, and the quadratic proximal setup with its mirror map.
//! * [`trace`] — per-round run traces with CSV import/export.
//!
//! Numerical code is generic over the scalar type through the [`Scalar`]
//! trait (implemented for `f32` and `f64`); the `*64` aliases at the crate
//! root fix the double-precision instantiations used by the CLI and the test
//! suites.

pub mod cda;
pub mod dda;
pub mod error;
pub mod linalg;
pub mod monitor;
pub mod network;
pub mod objective;
pub mod pgd;
pub mod prox;
pub mod sets;
pub mod trace;

use std::iter::Sum;

use ndarray::NdFloat;

pub use error::{Error, Result};

/// Floating-point scalar usable by every routine in this crate.
///
/// `NdFloat` brings the `num-traits` float hierarchy plus the operator
/// bounds `ndarray` needs for arithmetic on owned and borrowed arrays;
/// `Sum` lets iterator reductions stay generic. Constants are produced
/// with `S::from(x).unwrap()`, which is infallible for `f32`/`f64`.
pub trait Scalar: NdFloat + Sum {}

impl<T: NdFloat + Sum> Scalar for T {}

/// Double-precision feasible set.
pub type FeasibleSet64 = sets::FeasibleSet<f64>;
/// Double-precision proximal setup.
pub type ProximalSetup64 = prox::ProximalSetup<f64>;
/// Double-precision local objective.
pub type LocalObjective64 = objective::LocalObjective<f64>;
/// Double-precision finite-sum objective.
pub type ObjectiveSplit64 = objective::ObjectiveSplit<f64>;
/// Double-precision mixing model.
pub type MixingModel64 = network::MixingModel<f64>;
