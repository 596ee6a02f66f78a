//! Plain projected-gradient descent.
//!
//! Used as an independent reference: long, small-step runs of this solver
//! pin down minimizers of convex instances against which the dual-averaging
//! engines are checked, and its fixed points characterize constrained
//! stationarity.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg::l2_norm;
use crate::objective::ObjectiveSplit;
use crate::sets::FeasibleSet;
use crate::Scalar;

/// Result of a projected-gradient run.
#[derive(Debug, Clone)]
pub struct PgdOutcome<S: Scalar> {
    pub x: Array1<S>,
    pub value: S,
    pub iterations: usize,
    /// True when the iterate displacement fell below the tolerance before
    /// the iteration cap.
    pub converged: bool,
}

/// Iterates `x <- project(x - step * grad f(x))` until the displacement is
/// at most `tol` or `max_iterations` is reached.
pub fn minimize_projected_gradient<S: Scalar>(
    objective: &ObjectiveSplit<S>,
    set: &FeasibleSet<S>,
    start: &Array1<S>,
    step: S,
    max_iterations: usize,
    tol: S,
) -> Result<PgdOutcome<S>> {
    if !(step > S::zero()) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "projected-gradient step must be positive and finite, got {step:?}"
        )));
    }
    let mut x = set.project(start)?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let g = objective.gradient(&x)?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "projected gradient",
                round: iterations,
            });
        }
        let next = set.project(&(&x - &g.mapv(|v| v * step)))?;
        let moved = l2_norm(&(&next - &x));
        x = next;
        if moved <= tol {
            converged = true;
            break;
        }
    }
    let value = objective.value(&x)?;
    Ok(PgdOutcome {
        x,
        value,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{quadratic_instance, LocalObjective};
    use ndarray::{array, Array2};

    #[test]
    fn identity_quadratic_on_a_ball_converges_to_the_origin() {
        let locals = vec![
            LocalObjective::<f64>::quadratic(Array2::eye(3), Array1::zeros(3)).unwrap(),
        ];
        let split = ObjectiveSplit::from_locals(locals, 0).unwrap();
        let set = FeasibleSet::ball(Array1::zeros(3), 1.0).unwrap();
        let out = minimize_projected_gradient(
            &split,
            &set,
            &array![0.9, -0.3, 0.1],
            1.0,
            10_000,
            1e-12,
        )
        .unwrap();
        assert!(out.converged);
        assert!(l2_norm(&out.x) <= 1e-10);
        assert!(out.value.abs() <= 1e-18);
    }

    #[test]
    fn interior_minimizer_matches_the_closed_form() {
        // f(x) = x'Ax/2 + b'x with A = diag(2, 4): minimizer -A^{-1} b.
        let a = array![[2.0_f64, 0.0], [0.0, 4.0]];
        let b = array![0.5, -1.0];
        let locals = vec![LocalObjective::quadratic(a, b).unwrap()];
        let split = ObjectiveSplit::from_locals(locals, 0).unwrap();
        let set = FeasibleSet::ball(Array1::zeros(2), 10.0).unwrap();
        let out = minimize_projected_gradient(
            &split,
            &set,
            &Array1::zeros(2),
            0.2,
            100_000,
            1e-13,
        )
        .unwrap();
        assert!(out.converged);
        assert!((out.x[0] - (-0.25)).abs() <= 1e-10);
        assert!((out.x[1] - 0.25).abs() <= 1e-10);
    }

    #[test]
    fn strongly_convex_instances_converge_quickly() {
        let split = quadratic_instance::<f64>(3, 8, 19, true).unwrap();
        let set = FeasibleSet::ball(Array1::zeros(8), 1.0).unwrap();
        let step = 1.0 / split.lipschitz();
        let out = minimize_projected_gradient(
            &split,
            &set,
            &Array1::zeros(8),
            step,
            1_000_000,
            1e-10,
        )
        .unwrap();
        assert!(out.converged, "no convergence in {} iters", out.iterations);
        assert!(out.iterations < 100_000);
    }
}
