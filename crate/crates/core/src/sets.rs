//! Feasible sets: Euclidean balls, axis-aligned boxes, and the whole space.
//!
//! Balls and boxes are compact and convex with closed-form Euclidean
//! projections. The whole space carries an identity "projection" and exists
//! as an escape hatch for unconstrained sanity checks in the centralized
//! engine; the distributed engine rejects it because its guarantees need a
//! compact set.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg::l2_norm;
use crate::Scalar;

/// Default tolerance for membership checks.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// A convex feasible set with a closed-form Euclidean projection.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet<S: Scalar> {
    /// `{ x : |x - center| <= radius }`
    Ball { center: Array1<S>, radius: S },
    /// `{ x : lower <= x <= upper }` componentwise.
    Box {
        lower: Array1<S>,
        upper: Array1<S>,
    },
    /// All of `R^dim`; projection is the identity.
    WholeSpace { dim: usize },
}

impl<S: Scalar> FeasibleSet<S> {
    /// Euclidean ball. The radius must be positive and finite.
    pub fn ball(center: Array1<S>, radius: S) -> Result<Self> {
        if !(radius > S::zero()) || !radius.is_finite() {
            return Err(Error::InvalidSet(format!(
                "ball radius must be positive and finite, got {radius:?}"
            )));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSet("ball center must be finite".into()));
        }
        if center.is_empty() {
            return Err(Error::InvalidSet("ball needs a positive dimension".into()));
        }
        Ok(Self::Ball { center, radius })
    }

    /// Axis-aligned box. Bounds must be finite with `lower <= upper`.
    pub fn box_bounds(lower: Array1<S>, upper: Array1<S>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidSet("box needs a positive dimension".into()));
        }
        for (l, u) in lower.iter().zip(upper.iter()) {
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::InvalidSet("box bounds must be finite".into()));
            }
            if l > u {
                return Err(Error::InvalidSet(format!(
                    "box lower bound {l:?} exceeds upper bound {u:?}"
                )));
            }
        }
        Ok(Self::Box { lower, upper })
    }

    /// Unconstrained space of the given dimension.
    pub fn whole_space(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSet(
                "whole space needs a positive dimension".into(),
            ));
        }
        Ok(Self::WholeSpace { dim })
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { center, .. } => center.len(),
            Self::Box { lower, .. } => lower.len(),
            Self::WholeSpace { dim } => *dim,
        }
    }

    /// Whether the set is compact (bounded). The whole space is not.
    pub fn is_compact(&self) -> bool {
        !matches!(self, Self::WholeSpace { .. })
    }

    /// Membership test with an absolute slack `tol`.
    pub fn contains(&self, x: &Array1<S>, tol: S) -> Result<bool> {
        self.check_dim(x)?;
        Ok(match self {
            Self::Ball { center, radius } => {
                let diff = x - center;
                l2_norm(&diff) <= *radius + tol
            }
            Self::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(v, (l, u))| *v >= *l - tol && *v <= *u + tol),
            Self::WholeSpace { .. } => x.iter().all(|v| v.is_finite()),
        })
    }

    /// Euclidean projection onto the set.
    ///
    /// Idempotent, non-expansive, and the identity on points already in the
    /// set.
    pub fn project(&self, x: &Array1<S>) -> Result<Array1<S>> {
        self.check_dim(x)?;
        Ok(match self {
            Self::Ball { center, radius } => {
                let diff = x - center;
                let dist = l2_norm(&diff);
                if dist <= *radius {
                    x.clone()
                } else {
                    center + &diff.mapv(|d| d * (*radius / dist))
                }
            }
            Self::Box { lower, upper } => Array1::from_shape_fn(x.len(), |i| {
                x[i].max(lower[i]).min(upper[i])
            }),
            Self::WholeSpace { .. } => x.clone(),
        })
    }

    /// Largest Euclidean norm attained on the set, or `None` when unbounded.
    ///
    /// Used to turn operator-norm bounds on local objectives into lower
    /// bounds on their values over the set.
    pub fn max_point_norm(&self) -> Option<S> {
        match self {
            Self::Ball { center, radius } => Some(l2_norm(center) + *radius),
            Self::Box { lower, upper } => {
                let s = lower
                    .iter()
                    .zip(upper.iter())
                    .map(|(l, u)| {
                        let m = l.abs().max(u.abs());
                        m * m
                    })
                    .sum::<S>();
                Some(s.sqrt())
            }
            Self::WholeSpace { .. } => None,
        }
    }

    fn check_dim(&self, x: &Array1<S>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}
