//! Quadratic proximal setup and its mirror map.
//!
//! The proximal function is `d(x) = |x - center|^2 / (2a)` with step
//! parameter `a > 0`; it is `(1/a)`-strongly convex, vanishes at its center,
//! and its conjugate gradient (the mirror map) restricted to a feasible set
//! has the closed form `mirror(z) = project(center + a z)`.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg::l2_norm_sq;
use crate::sets::FeasibleSet;
use crate::Scalar;

/// Tolerance used by [`ProximalSetup::strong_convexity_probe`].
pub const STRONG_CONVEXITY_TOL: f64 = 1e-10;

/// Quadratic proximal function `d(x) = |x - center|^2 / (2a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximalSetup<S: Scalar> {
    center: Array1<S>,
    a: S,
}

impl<S: Scalar> ProximalSetup<S> {
    /// Builds the setup; `a` must be positive and finite, the center finite.
    pub fn new(center: Array1<S>, a: S) -> Result<Self> {
        if !(a > S::zero()) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "proximal step parameter must be positive and finite, got {a:?}"
            )));
        }
        if center.is_empty() || center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "proximal center must be a non-empty finite vector".into(),
            ));
        }
        Ok(Self { center, a })
    }

    pub fn a(&self) -> S {
        self.a
    }

    pub fn center(&self) -> &Array1<S> {
        &self.center
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `d(x)`; zero exactly at the center.
    pub fn value(&self, x: &Array1<S>) -> Result<S> {
        self.check_dim(x)?;
        let two = S::from(2.0).unwrap();
        Ok(l2_norm_sq(&(x - &self.center)) / (two * self.a))
    }

    /// `grad d(x) = (x - center) / a`.
    pub fn gradient(&self, x: &Array1<S>) -> Result<Array1<S>> {
        self.check_dim(x)?;
        Ok((x - &self.center).mapv(|v| v / self.a))
    }

    /// Mirror map: `argmax_{x in set} (<z, x> - d(x)) = project(center + a z)`.
    ///
    /// The result is always feasible because it is produced by the set's own
    /// projection.
    pub fn mirror_map(&self, set: &FeasibleSet<S>, z: &Array1<S>) -> Result<Array1<S>> {
        self.check_dim(z)?;
        if set.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: set.dim(),
            });
        }
        let target = &self.center + &z.mapv(|v| v * self.a);
        set.project(&target)
    }

    /// Checks the strong-convexity inequality of `d` with modulus `1/a` on
    /// the pair `(x, y)`.
    pub fn strong_convexity_probe(&self, x: &Array1<S>, y: &Array1<S>) -> Result<bool> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let value = |p: &Array1<S>| self.value(p).expect("dim checked");
        let gradient = |p: &Array1<S>| self.gradient(p).expect("dim checked");
        Ok(strong_convexity_holds(
            value,
            gradient,
            S::one() / self.a,
            x,
            y,
            S::from(STRONG_CONVEXITY_TOL).unwrap(),
        ))
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

/// `d(y) >= d(x) + <grad d(x), y - x> + (modulus/2) |y - x|^2 - tol`?
///
/// Exposed separately so tests can aim it at arbitrary candidate proximal
/// functions (including deliberately non-convex ones).
pub fn strong_convexity_holds<S, V, G>(
    value: V,
    gradient: G,
    modulus: S,
    x: &Array1<S>,
    y: &Array1<S>,
    tol: S,
) -> bool
where
    S: Scalar,
    V: Fn(&Array1<S>) -> S,
    G: Fn(&Array1<S>) -> Array1<S>,
{
    let two = S::from(2.0).unwrap();
    let diff = y - x;
    let linear = gradient(x)
        .iter()
        .zip(diff.iter())
        .map(|(&g, &d)| g * d)
        .sum::<S>();
    let lhs = value(y);
    let rhs = value(x) + linear + modulus / two * l2_norm_sq(&diff);
    lhs >= rhs - tol
}
