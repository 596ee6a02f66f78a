//! Distributed dual averaging with gradient tracking over random networks.
//!
//! Each agent keeps a primal iterate `x_i`, a dual vector `z_i`, a tracker
//! `s_i` estimating the network-average gradient, and its last local
//! gradient.  One communication round with mixing matrix `P` performs
//!
//! ```text
//! z_i <- sum_j p_ij (z_j + s_j)
//! x_i <- mirror(-z_i)
//! s_i <- (sum_j p_ij s_j - grad_i_old) + grad f_i(x_i)
//! ```
//!
//! Two invariants make the scheme analyzable and are monitored every round:
//! the tracker mean equals the mean local gradient, and the dual mean obeys
//! the centralized recursion `z_bar <- z_bar + g_bar`.  Progress is measured
//! along the auxiliary sequence `y = mirror(-z_bar)` through the residual
//! `n ||G(y, z_bar)||^2 + sum_i ||x_i - y||^2`, whose running minimum decays
//! like `C / t` for the constant computed by [`residual_rate_constant`].

use ndarray::Array1;
use rand::Rng;

use crate::cda::gradient_mapping;
use crate::error::{Error, Result};
use crate::linalg::{l2_norm, l2_norm_sq};
use crate::monitor::{Violation, ViolationKind};
use crate::network::{
    coupling_spectral_radius, verify_doubly_stochastic, MixingMatrix, MixingModel,
    DOUBLY_STOCHASTIC_TOL,
};
use crate::objective::ObjectiveSplit;
use crate::prox::ProximalSetup;
use crate::sets::FeasibleSet;
use crate::trace::{DdaRow, DdaTrace, DpgaRow, DpgaTrace};
use crate::Scalar;

/// Allowed gap between the tracker mean and the mean local gradient.
pub const TRACKING_TOL: f64 = 1e-10;
/// Allowed gap in the dual-mean recursion `z_bar_t = z_bar_{t-1} + g_bar_{t-1}`.
pub const DUAL_MEAN_TOL: f64 = 1e-10;
/// Additive slack for the per-agent deviation bound `||x_i - y|| <= a ||z_i - z_bar||`.
pub const DEVIATION_SLACK: f64 = 1e-12;
/// Additive slack for the per-round cost-descent inequality.
pub const COST_DESCENT_SLACK: f64 = 1e-8;
/// Residual at or below this level counts as numerically stationary.
pub const STATIONARY_RESIDUAL_THRESHOLD: f64 = 1e-16;
/// Consecutive stationary rounds before the disagreement check fires.
pub const STATIONARY_WINDOW: usize = 10;
/// Maximum pairwise iterate distance allowed at a stationary point.
pub const STATIONARY_PAIRWISE_TOL: f64 = 1e-7;

/// Per-agent state.
#[derive(Debug, Clone)]
pub struct AgentState<S: Scalar> {
    pub x: Array1<S>,
    pub z: Array1<S>,
    /// Gradient tracker: the agent's running estimate of the mean gradient.
    pub s: Array1<S>,
    /// Local gradient at the agent's current iterate.
    pub grad: Array1<S>,
}

/// Network-wide state.
#[derive(Debug, Clone)]
pub struct DdaState<S: Scalar> {
    pub round: usize,
    pub agents: Vec<AgentState<S>>,
    /// True when the proximal center was infeasible and the common starting
    /// point had to be projected onto the set.
    pub center_projected: bool,
}

impl<S: Scalar> DdaState<S> {
    /// Mean of the agents' dual vectors.
    pub fn dual_mean(&self) -> Array1<S> {
        mean_of(self.agents.iter().map(|ag| &ag.z))
    }

    /// Mean of the agents' primal iterates.
    pub fn primal_mean(&self) -> Array1<S> {
        mean_of(self.agents.iter().map(|ag| &ag.x))
    }

    /// Mean of the agents' current local gradients.
    pub fn gradient_mean(&self) -> Array1<S> {
        mean_of(self.agents.iter().map(|ag| &ag.grad))
    }

    /// Mean of the agents' trackers.
    pub fn tracker_mean(&self) -> Array1<S> {
        mean_of(self.agents.iter().map(|ag| &ag.s))
    }

    /// Initial gradient dispersion `sum_i ||grad_i - g_bar||^2`, the quantity
    /// that seeds the tracker-error term of the rate constant.  Meaningful at
    /// any round; callers freeze it at round zero.
    pub fn gradient_dispersion_sq(&self) -> f64 {
        let g_bar = self.gradient_mean();
        self.agents
            .iter()
            .map(|ag| l2_norm_sq(&(&ag.grad - &g_bar)).to_f64().unwrap_or(f64::NAN))
            .sum()
    }
}

fn mean_of<'a, S: Scalar, I: Iterator<Item = &'a Array1<S>>>(mut arrays: I) -> Array1<S> {
    let first = arrays.next().expect("mean of at least one array");
    let mut acc = first.clone();
    let mut count = 1usize;
    for a in arrays {
        acc = acc + a;
        count += 1;
    }
    let inv = S::one() / S::from(count as f64).unwrap();
    acc.mapv(|v| v * inv)
}

/// Starts every agent at `mirror(0)` with zero dual vector and the tracker
/// seeded by the local gradient.  Distributed runs require a compact set:
/// the deviation and residual guarantees lean on bounded iterates.
pub fn dda_init<S: Scalar>(
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
) -> Result<DdaState<S>> {
    if prox.dim() != objective.dim() {
        return Err(Error::DimensionMismatch { expected: objective.dim(), got: prox.dim() });
    }
    if set.dim() != objective.dim() {
        return Err(Error::DimensionMismatch { expected: objective.dim(), got: set.dim() });
    }
    if !set.is_compact() {
        return Err(Error::InvalidSet(
            "distributed runs require a compact feasible set (ball or box)".into(),
        ));
    }
    let zero = Array1::<S>::zeros(prox.dim());
    let x0 = prox.mirror_map(set, &zero)?;
    let center_gap = l2_norm(&(&x0 - prox.center()));
    let center_projected = center_gap > S::from(crate::sets::FEASIBILITY_TOL).unwrap();
    let mut agents = Vec::with_capacity(objective.n());
    for i in 0..objective.n() {
        let grad = objective.local(i).gradient(&x0)?;
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "local gradient", round: 0 });
        }
        agents.push(AgentState {
            x: x0.clone(),
            z: Array1::zeros(prox.dim()),
            s: grad.clone(),
            grad,
        });
    }
    Ok(DdaState { round: 0, agents, center_projected })
}

/// Advances all agents by one communication round under `mixing`.
///
/// The matrix is re-verified doubly stochastic so corrupted inputs fail loud.
/// The tracker update is grouped as `(mixed_s - old_grad) + new_grad`, which
/// keeps a single isolated agent's tracker bit-identical to its local
/// gradient and hence the whole scheme identical to centralized dual
/// averaging when `n = 1`.
pub fn dda_round<S: Scalar>(
    state: &mut DdaState<S>,
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
    mixing: &MixingMatrix<S>,
) -> Result<()> {
    let n = state.agents.len();
    if objective.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: objective.n() });
    }
    if mixing.entries.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mixing.entries.nrows() });
    }
    verify_doubly_stochastic(&mixing.entries, S::from(DOUBLY_STOCHASTIC_TOL).unwrap())?;

    let dim = prox.dim();
    let round = state.round;
    let dual_plus_tracker: Vec<Array1<S>> =
        state.agents.iter().map(|ag| &ag.z + &ag.s).collect();

    let mut next: Vec<AgentState<S>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut z_new = Array1::<S>::zeros(dim);
        let mut s_mixed = Array1::<S>::zeros(dim);
        for j in 0..n {
            let w = mixing.entries[[i, j]];
            if w != S::zero() {
                z_new.scaled_add(w, &dual_plus_tracker[j]);
                s_mixed.scaled_add(w, &state.agents[j].s);
            }
        }
        let x_new = prox.mirror_map(set, &z_new.mapv(|v| -v))?;
        let grad_new = objective.local(i).gradient(&x_new)?;
        if grad_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "local gradient", round });
        }
        let s_new = &(&s_mixed - &state.agents[i].grad) + &grad_new;
        next.push(AgentState { x: x_new, z: z_new, s: s_new, grad: grad_new });
    }
    state.agents = next;
    state.round += 1;
    Ok(())
}

/// Network-level progress measurements at the current state.
#[derive(Debug, Clone)]
pub struct RoundMetrics<S: Scalar> {
    /// Mean dual vector.
    pub z_bar: Array1<S>,
    /// Auxiliary iterate `mirror(-z_bar)`.
    pub y: Array1<S>,
    /// Objective value at `y`.
    pub cost: f64,
    /// Squared gradient-mapping norm at `(y, z_bar)`.
    pub grad_map_sq: f64,
    /// `sum_i ||x_i - x_bar||^2`.
    pub consensus_err_sq: f64,
    /// `sum_i ||x_i - y||^2`.
    pub deviation_sq: f64,
    /// `n * grad_map_sq + deviation_sq`, the decaying stationarity residual.
    pub residual: f64,
}

/// Computes the auxiliary iterate and all progress metrics.
pub fn round_metrics<S: Scalar>(
    state: &DdaState<S>,
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
) -> Result<RoundMetrics<S>> {
    let n = state.agents.len();
    let z_bar = state.dual_mean();
    let y = prox.mirror_map(set, &z_bar.mapv(|v| -v))?;
    let cost = objective.value(&y)?.to_f64().unwrap_or(f64::NAN);
    let gm = gradient_mapping(&y, &z_bar, objective, prox, set)?;
    let grad_map_sq = l2_norm_sq(&gm).to_f64().unwrap_or(f64::NAN);
    let x_bar = state.primal_mean();
    let mut consensus_err_sq = 0.0_f64;
    let mut deviation_sq = 0.0_f64;
    for ag in &state.agents {
        consensus_err_sq += l2_norm_sq(&(&ag.x - &x_bar)).to_f64().unwrap_or(f64::NAN);
        deviation_sq += l2_norm_sq(&(&ag.x - &y)).to_f64().unwrap_or(f64::NAN);
    }
    Ok(RoundMetrics {
        z_bar,
        y,
        cost,
        grad_map_sq,
        consensus_err_sq,
        deviation_sq,
        residual: n as f64 * grad_map_sq + deviation_sq,
    })
}

/// The constant `C` in the `min-residual <= C / t` decay guarantee.
///
/// Requires the coupling matrix at `(a, l, beta)` to be a contraction and the
/// per-round progress coefficient to stay positive; both hold automatically
/// for steps passing `dda_stepsize_feasible`.  `dispersion_sq` is the initial
/// gradient dispersion (see [`DdaState::gradient_dispersion_sq`]), `f_y0` the
/// cost at the initial auxiliary iterate and `f_lower` a lower bound on the
/// objective over the set.
pub fn residual_rate_constant(
    l: f64,
    beta: f64,
    a: f64,
    dispersion_sq: f64,
    f_y0: f64,
    f_lower: f64,
    n: usize,
) -> Result<f64> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidParameter(format!("smoothness constant must be positive, got {l}")));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {a}")));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta must lie in [0, 1), got {beta}")));
    }
    if !(dispersion_sq.is_finite() && dispersion_sq >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gradient dispersion must be nonnegative, got {dispersion_sq}"
        )));
    }
    if !f_y0.is_finite() || !f_lower.is_finite() || f_lower > f_y0 {
        return Err(Error::InvalidParameter(format!(
            "need finite f_lower <= f(y_0), got f_lower = {f_lower}, f(y_0) = {f_y0}"
        )));
    }
    let rho = coupling_spectral_radius(a, l, beta);
    if !(rho < 1.0) {
        return Err(Error::Infeasible(format!(
            "coupling matrix has spectral radius {rho} >= 1 at step {a}; no decay constant exists"
        )));
    }
    let tracker_gain = 3.0 * l * (1.0 - rho) / 8.0;
    let descent_gain = a - a * a * l / 2.0 - 4.0 * a * a * l / (3.0 * (1.0 - rho));
    let gain = tracker_gain.min(descent_gain);
    if gain <= 0.0 {
        return Err(Error::Infeasible(format!(
            "progress coefficient {gain} is not positive at step {a} (beta = {beta})"
        )));
    }
    let budget = 2.0 * dispersion_sq / (3.0 * l * (1.0 - rho)) + n as f64 * (f_y0 - f_lower);
    Ok(budget / gain)
}

/// Run configuration for the distributed engine.
#[derive(Debug, Clone, Copy)]
pub struct DdaConfig {
    pub rounds: usize,
    /// Network contraction parameter; enables the coupling-dependent
    /// monitors and the decay-bound trace column.
    pub beta: Option<f64>,
    /// Objective lower bound over the set; with `beta`, enables the decay
    /// constant.
    pub f_lower: Option<f64>,
    /// Record per-round invariant violations.
    pub monitors: bool,
}

impl Default for DdaConfig {
    fn default() -> Self {
        Self { rounds: 1000, beta: None, f_lower: None, monitors: true }
    }
}

/// Everything a distributed run produced.
#[derive(Debug, Clone)]
pub struct DdaReport<S: Scalar> {
    pub trace: DdaTrace,
    pub state: DdaState<S>,
    /// Final auxiliary iterate.
    pub y_final: Array1<S>,
    /// Initial gradient dispersion `sum_i ||grad_i(x_0) - g_bar||^2`.
    pub dispersion_sq: f64,
    /// Cost at the initial auxiliary iterate.
    pub f_y0: f64,
    /// Coupling spectral radius at the run's step, when `beta` was supplied.
    pub rho: Option<f64>,
    /// Decay constant for the min-residual bound, when derivable.
    pub c_constant: Option<f64>,
    pub violations: Vec<Violation>,
    /// How many times the stationary-window disagreement check fired.
    pub stationary_checks: usize,
    /// True when beta was supplied but the coupling matrix is not a
    /// contraction, so the cost-descent monitor had to be skipped.
    pub cost_descent_skipped: bool,
    /// Diagnostic when the run aborted on non-finite values; the trace keeps
    /// every completed round.
    pub aborted: Option<String>,
}

/// Runs the distributed engine for `config.rounds` communication rounds,
/// drawing one mixing matrix per round from `model` via `rng`.
pub fn run_dda<S: Scalar, R: Rng + ?Sized>(
    objective: &ObjectiveSplit<S>,
    prox: &ProximalSetup<S>,
    set: &FeasibleSet<S>,
    model: &MixingModel<S>,
    config: &DdaConfig,
    rng: &mut R,
) -> Result<DdaReport<S>> {
    if model.n() != objective.n() {
        return Err(Error::DimensionMismatch { expected: objective.n(), got: model.n() });
    }
    let mut state = dda_init(objective, prox, set)?;
    let n = state.agents.len();
    let a = prox.a().to_f64().unwrap_or(f64::NAN);
    let l = objective.lipschitz().to_f64().unwrap_or(f64::NAN);
    let dispersion_sq = state.gradient_dispersion_sq();

    let rho = config.beta.map(|b| coupling_spectral_radius(a, l, b));
    // Tracker-to-descent coupling weight; defined only for contractive rho.
    let epsilon = rho.and_then(|r| if r < 1.0 { Some(4.0 * l / (3.0 * (1.0 - r))) } else { None });
    let cost_descent_skipped = config.beta.is_some() && epsilon.is_none();

    let mut metrics = round_metrics(&state, objective, prox, set)?;
    let f_y0 = metrics.cost;
    let c_constant = match (config.beta, config.f_lower) {
        (Some(b), Some(fl)) => {
            residual_rate_constant(l, b, a, dispersion_sq, f_y0, fl, n).ok()
        }
        _ => None,
    };

    let mut trace = DdaTrace::default();
    let mut violations = Vec::new();
    let mut aborted = None;
    let mut min_residual = f64::INFINITY;
    let mut stationary_streak = 0usize;
    let mut stationary_checks = 0usize;

    let push_row = |trace: &mut DdaTrace,
                    t: usize,
                    m: &RoundMetrics<S>,
                    min_residual: &mut f64,
                    change_plus_consensus: f64| {
        *min_residual = min_residual.min(m.residual);
        trace.rows.push(DdaRow {
            t,
            cost: m.cost,
            grad_map_sq: m.grad_map_sq,
            consensus_err_sq: m.consensus_err_sq,
            deviation_sq: m.deviation_sq,
            residual: m.residual,
            min_residual: *min_residual,
            c_over_t: c_constant.map_or(f64::NAN, |c| c / (t as f64 + 1.0)),
            change_plus_consensus,
        });
    };
    push_row(&mut trace, 0, &metrics, &mut min_residual, f64::NAN);

    for t in 1..=config.rounds {
        let prev_xs: Vec<Array1<S>> = state.agents.iter().map(|ag| ag.x.clone()).collect();
        let prev_z_bar = metrics.z_bar.clone();
        let prev_g_bar = state.gradient_mean();
        let prev_cost = metrics.cost;
        let prev_y = metrics.y.clone();
        let prev_deviation_sq = metrics.deviation_sq;

        let mixing = model.sample(rng)?;
        match dda_round(&mut state, objective, prox, set, &mixing) {
            Ok(()) => {}
            Err(Error::NonFinite { context, round }) => {
                aborted = Some(format!("non-finite {context} at round {round}"));
                break;
            }
            Err(e) => return Err(e),
        }
        metrics = match round_metrics(&state, objective, prox, set) {
            Ok(m) => m,
            Err(Error::NonFinite { context, round }) => {
                aborted = Some(format!("non-finite {context} at round {round}"));
                break;
            }
            Err(e) => return Err(e),
        };
        if !metrics.cost.is_finite() || !metrics.residual.is_finite() {
            aborted = Some(format!("non-finite progress metrics at round {t}"));
            break;
        }

        let change_sq: f64 = state
            .agents
            .iter()
            .zip(prev_xs.iter())
            .map(|(ag, old)| l2_norm_sq(&(&ag.x - old)).to_f64().unwrap_or(f64::NAN))
            .sum();
        push_row(
            &mut trace,
            t,
            &metrics,
            &mut min_residual,
            change_sq.sqrt() + metrics.consensus_err_sq.sqrt(),
        );

        if config.monitors {
            // Tracker mean must equal the mean local gradient.
            let tracking_gap = l2_norm(&(&state.tracker_mean() - &state.gradient_mean()))
                .to_f64()
                .unwrap_or(f64::NAN);
            if !(tracking_gap <= TRACKING_TOL) {
                violations.push(Violation {
                    round: t,
                    kind: ViolationKind::Tracking,
                    magnitude: tracking_gap,
                });
            }

            // The dual mean must follow the centralized recursion.
            let expected_z_bar = &prev_z_bar + &prev_g_bar;
            let dual_gap = l2_norm(&(&metrics.z_bar - &expected_z_bar))
                .to_f64()
                .unwrap_or(f64::NAN);
            if !(dual_gap <= DUAL_MEAN_TOL) {
                violations.push(Violation {
                    round: t,
                    kind: ViolationKind::DualMeanRecursion,
                    magnitude: dual_gap,
                });
            }

            // Mirror maps with the same quadratic prox are a-Lipschitz in the
            // dual argument: ||x_i - y|| <= a ||z_i - z_bar||.
            let mut worst_excess = f64::NEG_INFINITY;
            for ag in &state.agents {
                let lhs = l2_norm(&(&ag.x - &metrics.y)).to_f64().unwrap_or(f64::NAN);
                let rhs = a * l2_norm(&(&ag.z - &metrics.z_bar)).to_f64().unwrap_or(f64::NAN);
                worst_excess = worst_excess.max(lhs - rhs);
            }
            if !(worst_excess <= DEVIATION_SLACK) {
                violations.push(Violation {
                    round: t,
                    kind: ViolationKind::DeviationBound,
                    magnitude: worst_excess,
                });
            }

            // Smoothness plus tracker coupling bounds the cost increase along
            // the auxiliary sequence.
            if let Some(eps) = epsilon {
                let dy_sq = l2_norm_sq(&(&metrics.y - &prev_y)).to_f64().unwrap_or(f64::NAN);
                let lhs = n as f64 * (metrics.cost - prev_cost);
                let rhs = ((l + eps) / 2.0 - 1.0 / a) * n as f64 * dy_sq
                    + l * l / (2.0 * eps) * prev_deviation_sq
                    + COST_DESCENT_SLACK;
                if !(lhs <= rhs) {
                    violations.push(Violation {
                        round: t,
                        kind: ViolationKind::CostDescent,
                        magnitude: lhs - rhs,
                    });
                }
            }
        }

        // A residual pinned at numerical zero must mean all agents agree;
        // lingering disagreement would expose a silently broken run.
        if metrics.residual <= STATIONARY_RESIDUAL_THRESHOLD {
            stationary_streak += 1;
            if stationary_streak >= STATIONARY_WINDOW {
                stationary_checks += 1;
                stationary_streak = 0;
                let mut worst = 0.0_f64;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let gap = l2_norm(&(&state.agents[i].x - &state.agents[j].x))
                            .to_f64()
                            .unwrap_or(f64::NAN);
                        worst = worst.max(gap);
                    }
                }
                if !(worst <= STATIONARY_PAIRWISE_TOL) {
                    violations.push(Violation {
                        round: t,
                        kind: ViolationKind::StationaryDisagreement,
                        magnitude: worst,
                    });
                }
            }
        } else {
            stationary_streak = 0;
        }
    }

    let y_final = metrics.y.clone();
    Ok(DdaReport {
        trace,
        state,
        y_final,
        dispersion_sq,
        f_y0,
        rho,
        c_constant,
        violations,
        stationary_checks,
        cost_descent_skipped,
        aborted,
    })
}

/// Configuration for the projected-gradient consensus baseline.
#[derive(Debug, Clone, Copy)]
pub struct DpgaConfig {
    /// Gradient step size.
    pub eta: f64,
    pub rounds: usize,
}

/// Outcome of a baseline run.
#[derive(Debug, Clone)]
pub struct DpgaReport<S: Scalar> {
    pub trace: DpgaTrace,
    /// Final per-agent iterates.
    pub agents: Vec<Array1<S>>,
    /// First round whose cost exceeded the initial cost by ten times its
    /// scale, if any; the run continues and the trace is kept.
    pub diverged: Option<usize>,
}

/// Runs the baseline: each round every agent mixes neighbors' iterates and
/// takes a projected local-gradient step,
/// `x_i <- project(sum_j p_ij x_j - eta grad f_i(x_i))`.
/// The trace records the objective at the network mean iterate.
pub fn run_dpga<S: Scalar, R: Rng + ?Sized>(
    objective: &ObjectiveSplit<S>,
    set: &FeasibleSet<S>,
    model: &MixingModel<S>,
    starts: &[Array1<S>],
    config: &DpgaConfig,
    rng: &mut R,
) -> Result<DpgaReport<S>> {
    let n = objective.n();
    if model.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: model.n() });
    }
    if starts.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: starts.len() });
    }
    if !set.is_compact() {
        return Err(Error::InvalidSet(
            "distributed runs require a compact feasible set (ball or box)".into(),
        ));
    }
    if !(config.eta.is_finite() && config.eta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "baseline step must be finite and nonnegative, got {}",
            config.eta
        )));
    }
    let eta = S::from(config.eta).unwrap();
    let mut xs: Vec<Array1<S>> = Vec::with_capacity(n);
    for start in starts {
        if start.len() != objective.dim() {
            return Err(Error::DimensionMismatch { expected: objective.dim(), got: start.len() });
        }
        xs.push(set.project(start)?);
    }

    let mut trace = DpgaTrace::default();
    let mut diverged = None;
    let record = |trace: &mut DpgaTrace, t: usize, xs: &[Array1<S>], change_norm: f64| -> Result<f64> {
        let x_bar = mean_of(xs.iter());
        let cost = objective.value(&x_bar)?.to_f64().unwrap_or(f64::NAN);
        let consensus_err_sq: f64 = xs
            .iter()
            .map(|x| l2_norm_sq(&(x - &x_bar)).to_f64().unwrap_or(f64::NAN))
            .sum();
        trace.rows.push(DpgaRow {
            t,
            cost,
            consensus_err_sq,
            change_norm,
            change_plus_consensus: change_norm + consensus_err_sq.sqrt(),
        });
        Ok(cost)
    };
    let f0 = record(&mut trace, 0, &xs, f64::NAN)?;
    let blowup_level = f0 + 10.0 * f0.abs().max(1.0);

    for t in 1..=config.rounds {
        let mixing = model.sample(rng)?;
        verify_doubly_stochastic(&mixing.entries, S::from(DOUBLY_STOCHASTIC_TOL).unwrap())?;
        let mut next: Vec<Array1<S>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut mixed = Array1::<S>::zeros(objective.dim());
            for j in 0..n {
                let w = mixing.entries[[i, j]];
                if w != S::zero() {
                    mixed.scaled_add(w, &xs[j]);
                }
            }
            let grad = objective.local(i).gradient(&xs[i])?;
            if grad.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { context: "local gradient", round: t });
            }
            mixed.scaled_add(-eta, &grad);
            next.push(set.project(&mixed)?);
        }
        let change_sq: f64 = next
            .iter()
            .zip(xs.iter())
            .map(|(a, b)| l2_norm_sq(&(a - b)).to_f64().unwrap_or(f64::NAN))
            .sum();
        xs = next;
        let cost = record(&mut trace, t, &xs, change_sq.sqrt())?;
        if !cost.is_finite() {
            return Err(Error::NonFinite { context: "baseline cost", round: t });
        }
        if diverged.is_none() && cost > blowup_level {
            diverged = Some(t);
        }
    }
    Ok(DpgaReport { trace, agents: xs, diverged })
}
