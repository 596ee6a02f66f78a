//! Centralized dual averaging.
//!
//! The engine keeps a dual vector `z` — the running sum of gradients of the
//! averaged objective along the trajectory — and produces iterates through
//! the mirror map of a quadratic proximal setup:
//!
//! ```text
//! x_{t+1} = mirror(-z_{t+1}),    z_{t+1} = z_t + grad f(x_t).
//! ```
//!
//! Progress is measured by the gradient mapping
//! `G(x, z) = (mirror(-z) - mirror(-z - grad f(x))) / a`, which coincides
//! with `grad f(x)` on the whole space and with `(x_t - x_{t+1}) / a` along
//! the run. For `a < 2/L` the objective is non-increasing round over round
//! and the minimum squared mapping norm after `k` rounds decays like
//! `2 (f(x_0) - f_lower) / (a (2 - aL) k)`.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg::{l2_norm, l2_norm_sq};
use crate::monitor::{Violation, ViolationKind};
use crate::objective::ObjectiveSplit;
use crate::prox::ProximalSetup;
use crate::sets::FeasibleSet;
use crate::trace::{CdaRow, CdaTrace};
use crate::Scalar;

/// Largest allowed gap between `x` and `mirror(-z)` in [`gradient_mapping`].
pub const PAIR_CONSISTENCY_TOL: f64 = 1e-9;
/// Gradient-mapping norm below which a round counts as stationary.
pub const EARLY_STOP_GRAD_NORM: f64 = 1e-10;
/// Consecutive stationary rounds required to stop early.
pub const EARLY_STOP_WINDOW: usize = 10;

/// Mutable engine state.
#[derive(Debug, Clone)]
pub struct CdaState<S: Scalar> {
    pub round: usize,
    pub x: Array1<S>,
    pub z: Array1<S>,
    /// `f(x_t)` for every visited iterate, starting with the initial point.
    pub f_history: Vec<S>,
}

/// Starts the engine at `mirror(0)`, i.e. the proximal center projected
/// onto the feasible set.
pub fn cda_init<S: Scalar>(
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
) -> Result<CdaState<S>> {
    check_dims(objective, prox, set)?;
    let z = Array1::zeros(prox.dim());
    let x = prox.mirror_map(set, &z)?;
    let f0 = objective.value(&x)?;
    Ok(CdaState {
        round: 0,
        x,
        z,
        f_history: vec![f0],
    })
}

/// What one engine step produced.
#[derive(Debug, Clone)]
pub struct CdaStepRecord<S: Scalar> {
    /// Gradient mapping at the pre-step iterate, `(x_t - x_{t+1}) / a`.
    pub grad_map: Array1<S>,
    /// Objective value at the new iterate.
    pub f_new: S,
}

/// Advances the state by one round.
pub fn cda_step<S: Scalar>(
    state: &mut CdaState<S>,
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
) -> Result<CdaStepRecord<S>> {
    let g = objective.gradient(&state.x)?;
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "objective gradient",
            round: state.round,
        });
    }
    let z_new = &state.z + &g;
    let x_new = prox.mirror_map(set, &z_new.mapv(|v| -v))?;
    let inv_a = S::one() / prox.a();
    let grad_map = (&state.x - &x_new).mapv(|v| v * inv_a);
    let f_new = objective.value(&x_new)?;
    if !f_new.is_finite() {
        return Err(Error::NonFinite {
            context: "objective value",
            round: state.round,
        });
    }
    state.z = z_new;
    state.x = x_new;
    state.round += 1;
    state.f_history.push(f_new);
    Ok(CdaStepRecord { grad_map, f_new })
}

/// Gradient mapping at an arbitrary primal/dual pair.
///
/// The pair must be consistent (`x = mirror(-z)` within
/// [`PAIR_CONSISTENCY_TOL`]); this guards against mixing dual vectors across
/// runs, where the mapping would silently lose its meaning.
pub fn gradient_mapping<S: Scalar>(
    x: &Array1<S>,
    z: &Array1<S>,
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
) -> Result<Array1<S>> {
    let anchor = prox.mirror_map(set, &z.mapv(|v| -v))?;
    let gap = l2_norm(&(x - &anchor));
    let tol = S::from(PAIR_CONSISTENCY_TOL).unwrap();
    if !(gap <= tol) {
        return Err(Error::InconsistentPair {
            gap: gap.to_f64().unwrap_or(f64::NAN),
            tol: PAIR_CONSISTENCY_TOL,
        });
    }
    let g = objective.gradient(x)?;
    let shifted = prox.mirror_map(set, &(z + &g).mapv(|v| -v))?;
    let inv_a = S::one() / prox.a();
    Ok((&anchor - &shifted).mapv(|v| v * inv_a))
}

/// Step-size check against the descent threshold `2 / L`.
#[derive(Debug, Clone, Copy)]
pub struct StepSizeCheck<S> {
    pub a: S,
    pub lipschitz: S,
    pub limit: S,
    pub ok: bool,
}

/// Validates `0 < a < 2 / L`.
pub fn validate_stepsize_cda<S: Scalar>(a: S, lipschitz: S) -> StepSizeCheck<S> {
    let limit = if lipschitz > S::zero() {
        S::from(2.0).unwrap() / lipschitz
    } else {
        S::infinity()
    };
    StepSizeCheck {
        a,
        lipschitz,
        limit,
        ok: a > S::zero() && a.is_finite() && a < limit,
    }
}

/// Run configuration.
#[derive(Debug, Clone, Copy)]
pub struct CdaConfig<S> {
    pub rounds: usize,
    /// Lower bound on the objective; enables the decay-bound trace column.
    pub f_lower: Option<S>,
    /// Record per-round inequality violations.
    pub monitors: bool,
    /// Stop once the mapping norm stays at numerical zero for a window.
    pub early_stop: bool,
}

impl<S: Scalar> Default for CdaConfig<S> {
    fn default() -> Self {
        Self {
            rounds: 1000,
            f_lower: None,
            monitors: true,
            early_stop: false,
        }
    }
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct CdaReport<S: Scalar> {
    pub trace: CdaTrace,
    pub state: CdaState<S>,
    pub violations: Vec<Violation>,
    /// False when the step size missed `a < 2/L`; the run still proceeds.
    pub stepsize_ok: bool,
    /// Round at which the early-stop window closed, if it did.
    pub stopped_early: Option<usize>,
    /// Diagnostic when the run aborted on non-finite values; the trace keeps
    /// every completed round.
    pub aborted: Option<String>,
}

/// Runs the engine for `config.rounds` rounds (or until early stop/abort),
/// recording one trace row per visited iterate.
pub fn run_cda<S: Scalar>(
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
    config: &CdaConfig<S>,
) -> Result<CdaReport<S>> {
    let mut state = cda_init(objective, prox, set)?;
    let a = prox.a();
    let lipschitz = objective.lipschitz();
    let check = validate_stepsize_cda(a, lipschitz);
    let two = S::from(2.0).unwrap();
    // min_t |G|^2 <= bound_numer / (bound_denom * t)
    let bound_denom = a * (two - a * lipschitz);
    let bound_numer = config
        .f_lower
        .map(|fl| two * (state.f_history[0] - fl));

    let mut trace = CdaTrace::default();
    let mut violations = Vec::new();
    let mut min_gm_sq = f64::INFINITY;
    let mut stationary_streak = 0usize;
    let mut stopped_early = None;
    let mut aborted = None;

    let mono_tol = S::from(1e-12).unwrap();
    let ineq_tol = S::from(1e-10).unwrap();
    let ident_tol = 1e-12;

    for t in 0..config.rounds {
        let f_t = state.f_history[t];
        let x_t = state.x.clone();
        let z_t = state.z.clone();
        let record = match cda_step(&mut state, objective, prox, set) {
            Ok(r) => r,
            Err(Error::NonFinite { context, round }) => {
                aborted = Some(format!("non-finite {context} at round {round}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let gm_sq = l2_norm_sq(&record.grad_map).to_f64().unwrap_or(f64::NAN);
        min_gm_sq = min_gm_sq.min(gm_sq);
        let rate_bound = match (bound_numer, t) {
            (Some(numer), t) if t >= 1 && check.ok => {
                (numer / (bound_denom * S::from(t as f64).unwrap()))
                    .to_f64()
                    .unwrap_or(f64::NAN)
            }
            _ => f64::INFINITY,
        };
        trace.rows.push(CdaRow {
            t,
            f: f_t.to_f64().unwrap_or(f64::NAN),
            grad_map_sq: gm_sq,
            min_grad_map_sq: min_gm_sq,
            rate_bound,
        });

        if config.monitors {
            // The mapping recomputed from (x_t, z_t) must match the step
            // displacement identity.
            let recomputed = gradient_mapping(&x_t, &z_t, objective, prox, set)?;
            let ident_gap = l2_norm(&(&recomputed - &record.grad_map))
                .to_f64()
                .unwrap_or(f64::NAN);
            if !(ident_gap <= ident_tol) {
                violations.push(Violation {
                    round: t,
                    kind: ViolationKind::MappingIdentity,
                    magnitude: ident_gap,
                });
            }

            let step_vec = (&state.x - &x_t).mapv(|v| v);
            let g_t = objective.gradient(&x_t)?;
            let inner = g_t
                .iter()
                .zip(step_vec.iter())
                .map(|(&u, &v)| u * v)
                .sum::<S>();
            let quad = l2_norm_sq(&step_vec) / a;
            if inner > -quad + ineq_tol {
                violations.push(Violation {
                    round: t,
                    kind: ViolationKind::DescentInnerProduct,
                    magnitude: (inner + quad).to_f64().unwrap_or(f64::NAN),
                });
            }

            if check.ok {
                let guaranteed = bound_denom / two * S::from(gm_sq).unwrap();
                let actual = f_t - record.f_new;
                if actual < guaranteed - ineq_tol {
                    violations.push(Violation {
                        round: t,
                        kind: ViolationKind::PerRoundDecrease,
                        magnitude: (guaranteed - actual).to_f64().unwrap_or(f64::NAN),
                    });
                }
                if record.f_new > f_t + mono_tol {
                    violations.push(Violation {
                        round: t,
                        kind: ViolationKind::Monotonicity,
                        magnitude: (record.f_new - f_t).to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }

        if config.early_stop {
            if gm_sq.sqrt() <= EARLY_STOP_GRAD_NORM {
                stationary_streak += 1;
                if stationary_streak >= EARLY_STOP_WINDOW {
                    stopped_early = Some(t);
                    break;
                }
            } else {
                stationary_streak = 0;
            }
        }
    }

    Ok(CdaReport {
        trace,
        state,
        violations,
        stepsize_ok: check.ok,
        stopped_early,
        aborted,
    })
}

fn check_dims<S: Scalar>(
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
) -> Result<()> {
    if prox.dim() != objective.dim() {
        return Err(Error::DimensionMismatch {
            expected: objective.dim(),
            got: prox.dim(),
        });
    }
    if set.dim() != objective.dim() {
        return Err(Error::DimensionMismatch {
            expected: objective.dim(),
            got: set.dim(),
        });
    }
    Ok(())
}
