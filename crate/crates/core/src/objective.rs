//! Finite-sum objectives: `f(x) = (1/n) * sum_i f_i(x)`.
//!
//! Two concrete families are provided:
//!
//! * **Pca** — `f_i(x) = -|M_i x|^2` for a data block `M_i`; maximizing the
//!   captured variance of a shared direction `x` across local datasets.
//!   Smooth, nonconvex, with Lipschitz gradient constant `2 sigma_max(M_i)^2`.
//! * **Quadratic** — `f_i(x) = x' A_i x / 2 + b_i' x` with symmetric `A_i`
//!   (convex when `A_i` is positive semidefinite).
//!
//! Local summands are stored unscaled; [`ObjectiveSplit`] applies the `1/n`
//! averaging uniformly in `value` and `gradient`. The aggregate Lipschitz
//! constant is the maximum of the per-summand constants.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{l2_norm, power_iteration, PowerIteration};
use crate::sets::FeasibleSet;
use crate::Scalar;

/// Power-iteration convergence tolerance for Lipschitz estimates.
pub const LIPSCHITZ_POWER_TOL: f64 = 1e-10;
/// Power-iteration iteration cap for Lipschitz estimates.
pub const LIPSCHITZ_POWER_MAX_ITERS: usize = 10_000;
/// Safety factor applied to sampled (black-box) Lipschitz estimates.
pub const SAMPLED_LIPSCHITZ_SAFETY: f64 = 1.1;

/// One summand of a finite-sum objective.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalObjective<S: Scalar> {
    /// `f(x) = -|data x|^2`
    Pca { data: Array2<S> },
    /// `f(x) = x' matrix x / 2 + offset' x` with `matrix` symmetric.
    Quadratic {
        matrix: Array2<S>,
        offset: Array1<S>,
    },
}

impl<S: Scalar> LocalObjective<S> {
    /// Builds the data-block variant; the block must be non-empty and finite.
    pub fn pca(data: Array2<S>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidParameter(
                "data block must be non-empty".into(),
            ));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("data block must be finite".into()));
        }
        Ok(Self::Pca { data })
    }

    /// Builds the quadratic variant; `matrix` must be square, symmetric
    /// (within `1e-9`), and match the offset's dimension.
    pub fn quadratic(matrix: Array2<S>, offset: Array1<S>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.ncols(),
            });
        }
        if offset.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: offset.len(),
            });
        }
        let tol = S::from(1e-9).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                if (matrix[[i, j]] - matrix[[j, i]]).abs() > tol {
                    return Err(Error::InvalidParameter(
                        "quadratic matrix must be symmetric".into(),
                    ));
                }
            }
        }
        Ok(Self::Quadratic { matrix, offset })
    }

    /// Ambient dimension of the summand.
    pub fn dim(&self) -> usize {
        match self {
            Self::Pca { data } => data.ncols(),
            Self::Quadratic { matrix, .. } => matrix.nrows(),
        }
    }

    /// `f_i(x)`.
    pub fn value(&self, x: &Array1<S>) -> Result<S> {
        self.check_dim(x)?;
        Ok(match self {
            Self::Pca { data } => {
                let mx = data.dot(x);
                -mx.iter().map(|&v| v * v).sum::<S>()
            }
            Self::Quadratic { matrix, offset } => {
                let ax = matrix.dot(x);
                let half = S::from(0.5).unwrap();
                half * x.iter().zip(ax.iter()).map(|(&a, &b)| a * b).sum::<S>()
                    + offset.iter().zip(x.iter()).map(|(&a, &b)| a * b).sum::<S>()
            }
        })
    }

    /// `grad f_i(x)`.
    pub fn gradient(&self, x: &Array1<S>) -> Result<Array1<S>> {
        self.check_dim(x)?;
        Ok(match self {
            Self::Pca { data } => {
                let mx = data.dot(x);
                let two = S::from(2.0).unwrap();
                data.t().dot(&mx).mapv(|v| -two * v)
            }
            Self::Quadratic { matrix, offset } => matrix.dot(x) + offset,
        })
    }

    /// Lipschitz constant of the gradient via power iteration on the exact
    /// operator (`2 M'M` for data blocks, `A` for quadratics).
    pub fn lipschitz_estimate(&self, seed: u64) -> Result<LipschitzEstimate<S>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = S::from(LIPSCHITZ_POWER_TOL).unwrap();
        let pi: PowerIteration<S> = match self {
            Self::Pca { data } => {
                let op = |v: &Array1<S>| data.t().dot(&data.dot(v));
                power_iteration(self.dim(), op, &mut rng, tol, LIPSCHITZ_POWER_MAX_ITERS)?
            }
            Self::Quadratic { matrix, .. } => {
                let op = |v: &Array1<S>| matrix.dot(v);
                power_iteration(self.dim(), op, &mut rng, tol, LIPSCHITZ_POWER_MAX_ITERS)?
            }
        };
        let value = match self {
            Self::Pca { .. } => S::from(2.0).unwrap() * pi.value,
            Self::Quadratic { .. } => pi.value,
        };
        Ok(LipschitzEstimate {
            value,
            iterations: pi.iterations,
            converged: pi.converged,
        })
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

/// A gradient-Lipschitz-constant estimate together with its provenance.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzEstimate<S> {
    pub value: S,
    pub iterations: usize,
    /// `false` when power iteration hit its iteration cap; the value is then
    /// a best-effort estimate and callers should treat it with suspicion.
    pub converged: bool,
}

/// Finite-sum objective `f(x) = (1/n) sum_i f_i(x)`.
#[derive(Debug, Clone)]
pub struct ObjectiveSplit<S: Scalar> {
    locals: Vec<LocalObjective<S>>,
    local_lipschitz: Vec<S>,
    lipschitz: S,
    lipschitz_converged: bool,
}

impl<S: Scalar> ObjectiveSplit<S> {
    /// Assembles a split from summands of equal dimension and estimates the
    /// per-summand Lipschitz constants (the aggregate constant is their
    /// maximum). `seed` drives the power-iteration starting vectors.
    pub fn from_locals(locals: Vec<LocalObjective<S>>, seed: u64) -> Result<Self> {
        if locals.is_empty() {
            return Err(Error::InvalidParameter(
                "a split needs at least one summand".into(),
            ));
        }
        let dim = locals[0].dim();
        for l in &locals {
            if l.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: l.dim(),
                });
            }
        }
        let mut local_lipschitz = Vec::with_capacity(locals.len());
        let mut lipschitz = S::zero();
        let mut lipschitz_converged = true;
        for (i, l) in locals.iter().enumerate() {
            let est = l.lipschitz_estimate(seed.wrapping_add(i as u64))?;
            lipschitz = lipschitz.max(est.value);
            lipschitz_converged &= est.converged;
            local_lipschitz.push(est.value);
        }
        Ok(Self {
            locals,
            local_lipschitz,
            lipschitz,
            lipschitz_converged,
        })
    }

    pub fn n(&self) -> usize {
        self.locals.len()
    }

    pub fn dim(&self) -> usize {
        self.locals[0].dim()
    }

    pub fn locals(&self) -> &[LocalObjective<S>] {
        &self.locals
    }

    pub fn local(&self, i: usize) -> &LocalObjective<S> {
        &self.locals[i]
    }

    /// Max over summands of the gradient Lipschitz constants.
    pub fn lipschitz(&self) -> S {
        self.lipschitz
    }

    /// Per-summand Lipschitz constants, aligned with `locals()`.
    pub fn local_lipschitz(&self) -> &[S] {
        &self.local_lipschitz
    }

    /// Whether all power iterations behind `lipschitz()` converged.
    pub fn lipschitz_converged(&self) -> bool {
        self.lipschitz_converged
    }

    /// `(1/n) sum_i f_i(x)`.
    pub fn value(&self, x: &Array1<S>) -> Result<S> {
        let mut acc = S::zero();
        for l in &self.locals {
            acc = acc + l.value(x)?;
        }
        Ok(acc / S::from(self.n() as f64).unwrap())
    }

    /// `(1/n) sum_i grad f_i(x)`.
    pub fn gradient(&self, x: &Array1<S>) -> Result<Array1<S>> {
        let mut acc: Array1<S> = Array1::zeros(self.dim());
        for l in &self.locals {
            acc = acc + l.gradient(x)?;
        }
        let inv_n = S::one() / S::from(self.n() as f64).unwrap();
        Ok(acc.mapv(|v| v * inv_n))
    }

    /// Closed-form lower bound on `f` over a compact set, `None` for
    /// unbounded sets. With `R` the largest point norm of the set:
    /// data-block summands contribute `-sigma_max(M_i)^2 R^2`, quadratic
    /// summands `-(sigma_max(A_i)/2) R^2 - |b_i| R`.
    pub fn value_lower_bound(&self, set: &FeasibleSet<S>) -> Option<S> {
        let r = set.max_point_norm()?;
        let two = S::from(2.0).unwrap();
        let mut acc = S::zero();
        for (l, &lip) in self.locals.iter().zip(self.local_lipschitz.iter()) {
            match l {
                // lip = 2 sigma_max^2, so sigma_max^2 = lip / 2.
                LocalObjective::Pca { .. } => acc = acc - lip / two * r * r,
                // x'Ax/2 >= -sigma_max |x|^2 / 2 and b'x >= -|b||x|.
                LocalObjective::Quadratic { offset, .. } => {
                    let b_norm = offset.iter().map(|&v| v * v).sum::<S>().sqrt();
                    acc = acc - lip / two * r * r - b_norm * r;
                }
            }
        }
        Some(acc / S::from(self.n() as f64).unwrap())
    }
}

/// Generates a data-block instance: `n` blocks of shape `rows x dim` with
/// i.i.d. standard normal entries, each row divided by `max(1, |row|)` so
/// row norms never exceed one.
pub fn pca_instance<S: Scalar>(
    n: usize,
    rows: usize,
    dim: usize,
    seed: u64,
) -> Result<ObjectiveSplit<S>> {
    if n == 0 || rows == 0 || dim == 0 {
        return Err(Error::InvalidParameter(
            "instance sizes must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0_f64, 1.0).unwrap();
    let mut locals = Vec::with_capacity(n);
    for _ in 0..n {
        let mut data: Array2<S> = Array2::zeros((rows, dim));
        for r in 0..rows {
            let mut row: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1.0 {
                for v in &mut row {
                    *v /= norm;
                }
            }
            for (c, v) in row.into_iter().enumerate() {
                data[[r, c]] = S::from(v).unwrap();
            }
        }
        locals.push(LocalObjective::pca(data)?);
    }
    ObjectiveSplit::from_locals(locals, seed)
}

/// Generates a quadratic instance with controlled spectra: each `A_i` is
/// `Q diag(lambda) Q'` for a random orthogonal `Q` and eigenvalues drawn
/// uniformly from `[0.2, 2]`. With `convex = false` the first eigenvalue of
/// each summand is flipped negative, making the summand indefinite. Offsets
/// are `0.1 *` standard normal.
pub fn quadratic_instance<S: Scalar>(
    n: usize,
    dim: usize,
    seed: u64,
    convex: bool,
) -> Result<ObjectiveSplit<S>> {
    if n == 0 || dim == 0 {
        return Err(Error::InvalidParameter(
            "instance sizes must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0_f64, 1.0).unwrap();
    let mut locals = Vec::with_capacity(n);
    for _ in 0..n {
        let q = random_orthogonal(dim, &mut rng);
        let mut lambda: Vec<f64> = (0..dim).map(|_| rng.random_range(0.2..2.0)).collect();
        if !convex {
            lambda[0] = -lambda[0];
        }
        // A = Q diag(lambda) Q', symmetrized against roundoff.
        let mut a = Array2::<f64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                let mut s = 0.0;
                for k in 0..dim {
                    s += q[[i, k]] * lambda[k] * q[[j, k]];
                }
                a[[i, j]] = s;
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let m = (a[[i, j]] + a[[j, i]]) / 2.0;
                a[[i, j]] = m;
                a[[j, i]] = m;
            }
        }
        let matrix = a.mapv(|v| S::from(v).unwrap());
        let offset =
            Array1::from_shape_fn(dim, |_| S::from(0.1 * normal.sample(&mut rng)).unwrap());
        locals.push(LocalObjective::quadratic(matrix, offset)?);
    }
    ObjectiveSplit::from_locals(locals, seed)
}

/// Random orthogonal matrix via modified Gram-Schmidt on a Gaussian matrix.
fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let normal = Normal::new(0.0_f64, 1.0).unwrap();
    let mut q = Array2::<f64>::zeros((dim, dim));
    let mut col = 0;
    while col < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| normal.sample(rng)).collect();
        for prev in 0..col {
            let dot: f64 = (0..dim).map(|i| v[i] * q[[i, prev]]).sum();
            for i in 0..dim {
                v[i] -= dot * q[[i, prev]];
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // essentially impossible, but resample to stay safe
        }
        for i in 0..dim {
            q[[i, col]] = v[i] / norm;
        }
        col += 1;
    }
    q
}

/// Black-box Lipschitz estimate: max of `|g(x) - g(y)| / |x - y|` over
/// random feasible pairs, inflated by a 10% safety factor.
pub fn sampled_lipschitz<S, G>(
    gradient: G,
    set: &FeasibleSet<S>,
    pairs: usize,
    seed: u64,
) -> Result<S>
where
    S: Scalar,
    G: Fn(&Array1<S>) -> Array1<S>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = S::zero();
    for _ in 0..pairs {
        let x = sample_feasible_point(set, &mut rng)?;
        let y = sample_feasible_point(set, &mut rng)?;
        let dist = l2_norm(&(&x - &y));
        if dist <= S::from(1e-12).unwrap() {
            continue;
        }
        let ratio = l2_norm(&(gradient(&x) - gradient(&y))) / dist;
        best = best.max(ratio);
    }
    Ok(best * S::from(SAMPLED_LIPSCHITZ_SAFETY).unwrap())
}

/// Draws a point from the feasible set: uniform for balls and boxes,
/// standard normal for the whole space. Randomness is drawn in `f64` and
/// cast, so sequences agree across scalar types.
pub fn sample_feasible_point<S: Scalar, R: Rng + ?Sized>(
    set: &FeasibleSet<S>,
    rng: &mut R,
) -> Result<Array1<S>> {
    let normal = Normal::new(0.0_f64, 1.0).unwrap();
    let dim = set.dim();
    Ok(match set {
        FeasibleSet::Ball { center, radius } => {
            let dir: Vec<f64> = (0..dim).map(|_| normal.sample(rng)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            let u: f64 = rng.random_range(0.0..1.0_f64);
            let scale = u.powf(1.0 / dim as f64);
            Array1::from_shape_fn(dim, |i| {
                center[i] + *radius * S::from(scale * dir[i] / norm).unwrap()
            })
        }
        FeasibleSet::Box { lower, upper } => Array1::from_shape_fn(dim, |i| {
            let t: f64 = rng.random_range(0.0..1.0);
            lower[i] + (upper[i] - lower[i]) * S::from(t).unwrap()
        }),
        FeasibleSet::WholeSpace { .. } => {
            Array1::from_shape_fn(dim, |_| S::from(normal.sample(rng)).unwrap())
        }
    })
}

/// Central finite-difference gradient of `f` at `x` with step
/// `1e-6 * (1 + |x|)`.
pub fn finite_difference_gradient<S, F>(f: F, x: &Array1<S>) -> Array1<S>
where
    S: Scalar,
    F: Fn(&Array1<S>) -> S,
{
    let h = S::from(1e-6).unwrap() * (S::one() + l2_norm(x));
    let two = S::from(2.0).unwrap();
    let mut g = Array1::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + h;
        let fp = f(&probe);
        probe[i] = xi - h;
        let fm = f(&probe);
        probe[i] = xi;
        g[i] = (fp - fm) / (two * h);
    }
    g
}

/// Serializable description of a finite-sum instance.
///
/// The `entries` payloads are optional: with them the instance is rebuilt
/// verbatim; without them it is regenerated from the recorded seed.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceSpec {
    Pca {
        n: usize,
        rows: usize,
        dim: usize,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        entries: Option<Vec<Vec<Vec<f64>>>>,
    },
    Quadratic {
        n: usize,
        dim: usize,
        seed: u64,
        convex: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        entries: Option<QuadraticEntries>,
    },
}

/// Explicit quadratic payload: row-major matrices plus offsets.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadraticEntries {
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub offsets: Vec<Vec<f64>>,
}

impl InstanceSpec {
    /// Builds the double-precision instance the spec describes.
    pub fn build(&self) -> Result<ObjectiveSplit<f64>> {
        match self {
            Self::Pca {
                n,
                rows,
                dim,
                seed,
                entries,
            } => match entries {
                None => pca_instance(*n, *rows, *dim, *seed),
                Some(blocks) => {
                    if blocks.len() != *n {
                        return Err(Error::InvalidParameter(format!(
                            "expected {n} data blocks, got {}",
                            blocks.len()
                        )));
                    }
                    let mut locals = Vec::with_capacity(*n);
                    for block in blocks {
                        locals.push(LocalObjective::pca(rows_to_matrix(block, *rows, *dim)?)?);
                    }
                    ObjectiveSplit::from_locals(locals, *seed)
                }
            },
            Self::Quadratic {
                n,
                dim,
                seed,
                convex,
                entries,
            } => match entries {
                None => quadratic_instance(*n, *dim, *seed, *convex),
                Some(e) => {
                    if e.matrices.len() != *n || e.offsets.len() != *n {
                        return Err(Error::InvalidParameter(format!(
                            "expected {n} matrices and offsets, got {} and {}",
                            e.matrices.len(),
                            e.offsets.len()
                        )));
                    }
                    let mut locals = Vec::with_capacity(*n);
                    for (m, b) in e.matrices.iter().zip(e.offsets.iter()) {
                        let matrix = rows_to_matrix(m, *dim, *dim)?;
                        if b.len() != *dim {
                            return Err(Error::DimensionMismatch {
                                expected: *dim,
                                got: b.len(),
                            });
                        }
                        locals.push(LocalObjective::quadratic(
                            matrix,
                            Array1::from_vec(b.clone()),
                        )?);
                    }
                    ObjectiveSplit::from_locals(locals, *seed)
                }
            },
        }
    }

    /// Copies the instance's raw entries into the spec so `build()` no
    /// longer depends on the generator.
    pub fn embed_entries(&mut self, split: &ObjectiveSplit<f64>) -> Result<()> {
        match self {
            Self::Pca { n, entries, .. } => {
                if split.n() != *n {
                    return Err(Error::InvalidParameter(
                        "split size does not match spec".into(),
                    ));
                }
                let mut blocks = Vec::with_capacity(split.n());
                for l in split.locals() {
                    match l {
                        LocalObjective::Pca { data } => blocks.push(matrix_to_rows(data)),
                        _ => {
                            return Err(Error::InvalidParameter(
                                "family mismatch between spec and split".into(),
                            ))
                        }
                    }
                }
                *entries = Some(blocks);
            }
            Self::Quadratic { n, entries, .. } => {
                if split.n() != *n {
                    return Err(Error::InvalidParameter(
                        "split size does not match spec".into(),
                    ));
                }
                let mut matrices = Vec::with_capacity(split.n());
                let mut offsets = Vec::with_capacity(split.n());
                for l in split.locals() {
                    match l {
                        LocalObjective::Quadratic { matrix, offset } => {
                            matrices.push(matrix_to_rows(matrix));
                            offsets.push(offset.to_vec());
                        }
                        _ => {
                            return Err(Error::InvalidParameter(
                                "family mismatch between spec and split".into(),
                            ))
                        }
                    }
                }
                *entries = Some(QuadraticEntries { matrices, offsets });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<Array2<f64>> {
    if rows.len() != nrows {
        return Err(Error::DimensionMismatch {
            expected: nrows,
            got: rows.len(),
        });
    }
    let mut m = Array2::zeros((nrows, ncols));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                got: row.len(),
            });
        }
        for (j, v) in row.iter().enumerate() {
            m[[i, j]] = *v;
        }
    }
    Ok(m)
}

fn matrix_to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}
