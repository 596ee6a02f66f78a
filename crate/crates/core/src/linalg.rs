//! Small dense linear-algebra helpers: power iteration for operator norms
//! and a cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Matrices here are tiny (mixing matrices are `n x n` with `n` in the tens,
//! data blocks have a few hundred columns), so simple, dependency-free
//! routines with deterministic behaviour are preferred over a LAPACK
//! binding.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::Scalar;

/// Outcome of a power iteration run.
#[derive(Debug, Clone, Copy)]
pub struct PowerIteration<S> {
    /// Estimate of the largest singular value of the operator.
    pub value: S,
    /// Iterations actually performed.
    pub iterations: usize,
    /// Whether the estimate stabilized within the requested tolerance.
    pub converged: bool,
}

/// Estimates the largest singular value of a symmetric linear operator
/// `op: R^dim -> R^dim` by normalized power iteration.
///
/// Convergence is declared when the Rayleigh estimate moves by less than
/// `tol * max(1, value)` between iterations. For a symmetric operator the
/// returned value is the spectral radius `max |lambda|`.
pub fn power_iteration<S, F, R>(
    dim: usize,
    op: F,
    rng: &mut R,
    tol: S,
    max_iterations: usize,
) -> Result<PowerIteration<S>>
where
    S: Scalar,
    F: Fn(&Array1<S>) -> Array1<S>,
    R: Rng + ?Sized,
{
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "power iteration needs a positive dimension".into(),
        ));
    }
    let mut v: Array1<S> = Array1::from_shape_fn(dim, |_| {
        S::from(rng.random_range(-1.0_f64..1.0)).unwrap()
    });
    let mut norm = l2_norm(&v);
    if norm == S::zero() {
        v[0] = S::one();
        norm = S::one();
    }
    v.mapv_inplace(|x| x / norm);

    let mut estimate = S::zero();
    for it in 1..=max_iterations {
        let w = op(&v);
        if w.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: w.len(),
            });
        }
        let next = l2_norm(&w);
        if !next.is_finite() {
            return Err(Error::NonFinite {
                context: "power iteration",
                round: it,
            });
        }
        if next == S::zero() {
            // v is (numerically) in the kernel; for a symmetric operator the
            // iterate can only stay there if the operator itself vanishes.
            return Ok(PowerIteration {
                value: S::zero(),
                iterations: it,
                converged: true,
            });
        }
        let delta = (next - estimate).abs();
        estimate = next;
        v = w.mapv(|x| x / next);
        if delta <= tol * S::one().max(estimate) {
            return Ok(PowerIteration {
                value: estimate,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(PowerIteration {
        value: estimate,
        iterations: max_iterations,
        converged: false,
    })
}

/// Euclidean norm of a vector.
pub fn l2_norm<S: Scalar>(v: &Array1<S>) -> S {
    v.iter().map(|&x| x * x).sum::<S>().sqrt()
}

/// Squared Euclidean norm of a vector.
pub fn l2_norm_sq<S: Scalar>(v: &Array1<S>) -> S {
    v.iter().map(|&x| x * x).sum::<S>()
}

/// Eigenvalues of a symmetric matrix via the cyclic Jacobi method.
///
/// The input must be square and symmetric (checked against an absolute
/// tolerance scaled by the largest entry). Eigenvalues are returned in
/// ascending order.
pub fn symmetric_eigenvalues<S: Scalar>(matrix: &Array2<S>) -> Result<Array1<S>> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: matrix.ncols(),
        });
    }
    if n == 0 {
        return Ok(Array1::zeros(0));
    }
    let scale = matrix.iter().fold(S::zero(), |acc, &x| acc.max(x.abs()));
    let sym_tol = S::from(1e-9).unwrap() * S::one().max(scale);
    for i in 0..n {
        for j in (i + 1)..n {
            if (matrix[[i, j]] - matrix[[j, i]]).abs() > sym_tol {
                return Err(Error::InvalidParameter(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }

    let mut a = matrix.clone();
    // Force exact symmetry so rotations stay consistent.
    for i in 0..n {
        for j in (i + 1)..n {
            let m = (a[[i, j]] + a[[j, i]]) / S::from(2.0).unwrap();
            a[[i, j]] = m;
            a[[j, i]] = m;
        }
    }

    let off = |a: &Array2<S>| -> S {
        let mut s = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                s = s + a[[i, j]] * a[[i, j]];
            }
        }
        s.sqrt()
    };
    let frob = {
        let mut s = S::zero();
        for x in a.iter() {
            s = s + *x * *x;
        }
        s.sqrt()
    };
    let target = S::from(1e-15).unwrap() * S::one().max(frob);

    for _sweep in 0..100 {
        if off(&a) <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.abs() <= target / S::from(n as f64).unwrap() {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (S::from(2.0).unwrap() * apq);
                let t = {
                    let sign = if theta >= S::zero() { S::one() } else { -S::one() };
                    sign / (theta.abs() + (theta * theta + S::one()).sqrt())
                };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                // Rotate rows/columns p and q.
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut eig: Vec<S> = (0..n).map(|i| a[[i, i]]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(Array1::from_vec(eig))
}

/// Spectral radius (largest absolute eigenvalue) of a symmetric matrix.
pub fn symmetric_spectral_radius<S: Scalar>(matrix: &Array2<S>) -> Result<S> {
    let eig = symmetric_eigenvalues(matrix)?;
    Ok(eig
        .iter()
        .fold(S::zero(), |acc, &x| acc.max(x.abs())))
}

/// Spectral radius of a real 2x2 matrix `[[m11, m12], [m21, m22]]` from the
/// closed-form eigenvalue expressions.
pub fn spectral_radius_2x2<S: Scalar>(m11: S, m12: S, m21: S, m22: S) -> S {
    let two = S::from(2.0).unwrap();
    let four = S::from(4.0).unwrap();
    let tr = m11 + m22;
    let det = m11 * m22 - m12 * m21;
    let disc = tr * tr - four * det;
    if disc >= S::zero() {
        let root = disc.sqrt();
        let l1 = (tr + root) / two;
        let l2 = (tr - root) / two;
        l1.abs().max(l2.abs())
    } else {
        // Complex conjugate pair: |lambda|^2 = det.
        det.abs().sqrt()
    }
}
