//! Random time-varying communication networks and their mixing matrices.
//!
//! A network model produces, on each round, a doubly stochastic mixing
//! matrix supported on an undirected supergraph.  The module also provides
//! the two quantities the distributed engine needs from a model:
//!
//! * `beta_estimate` — the root spectral quantity
//!   `beta = sqrt(rho(E[P^T P] - 11^T/n))` that controls how fast repeated
//!   mixing contracts disagreement between agents, and
//! * `certify_stepsize_dda` — the largest prox step the convergence
//!   certificate of the distributed engine admits for a given smoothness
//!   constant and beta, found by bisection over a monotone feasibility
//!   predicate.

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius_2x2, symmetric_spectral_radius};
use crate::Scalar;
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write as IoWrite;

/// Tolerance used when verifying that a sampled matrix is doubly stochastic.
pub const DOUBLY_STOCHASTIC_TOL: f64 = 1e-12;

/// A beta estimate at least this close to one is flagged: the certified
/// step size would underflow and the model cannot drive consensus.
pub const BETA_FLAG_THRESHOLD: f64 = 1e-9;

/// Default Monte Carlo sample count for beta estimation.
pub const DEFAULT_BETA_SAMPLES: usize = 20_000;

/// Bisection iterations used by the step-size certificate search.
pub const CERTIFY_BISECTION_ITERS: usize = 60;

/// The certified step is the bisection output shrunk by this relative margin
/// so that the feasibility predicate holds strictly at the reported value.
pub const CERTIFY_SHRINK: f64 = 1e-6;

/// Certified steps below this threshold are reported as infeasible.
pub const CERTIFY_MIN_STEP: f64 = 1e-12;

/// An undirected supergraph on `n` nodes: the set of channels that may ever
/// be active.  Edges are stored deduplicated with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supergraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Supergraph {
    /// Builds a supergraph from an edge list.  Self-loops are rejected,
    /// endpoints must lie in `0..n`, and duplicate edges (in either
    /// orientation) are collapsed.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("a network needs at least one node".into()));
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidModel(format!("self-loop on node {u} is not allowed")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidModel(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(Self { n, edges: normalized })
    }

    /// The complete graph on `n` nodes.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n.saturating_mul(n.saturating_sub(1)) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Self::new(n, &edges)
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The normalized edge list (each edge once, `i < j`).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// One sampled communication round: the mixing matrix together with the
/// realized neighbor lists (off-diagonal support).
#[derive(Debug, Clone)]
pub struct MixingMatrix<S: Scalar> {
    /// Doubly stochastic matrix; entry `(i, j)` weights agent `j`'s message
    /// in agent `i`'s update.
    pub entries: Array2<S>,
    /// For each node, the nodes it exchanged messages with this round.
    pub active_neighbors: Vec<Vec<usize>>,
}

/// A random (or deterministic) generator of doubly stochastic mixing
/// matrices over a fixed supergraph.
#[derive(Debug, Clone)]
pub enum MixingModel<S: Scalar> {
    /// Every supergraph edge is active independently with probability `p`;
    /// active edges get weight `1/tau` and diagonals absorb the rest.
    /// Requires `tau >= max degree + 1` so diagonals stay nonnegative.
    BernoulliEdges { graph: Supergraph, p: f64, tau: f64 },
    /// One uniformly random edge is active per round; its two endpoints
    /// average their values (weight 1/2), everyone else holds.
    Gossip { graph: Supergraph },
    /// Every round uses the exact uniform-averaging matrix `11^T/n`.
    PerfectAveraging { n: usize },
    /// Every round uses the same fixed doubly stochastic matrix.
    Static { matrix: Array2<S> },
}

impl<S: Scalar> MixingModel<S> {
    /// Bernoulli edge-activation model.  `tau` scales the edge weights;
    /// it must be at least the maximum supergraph degree plus one.
    pub fn bernoulli(graph: Supergraph, p: f64, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidModel(format!(
                "activation probability must lie in [0, 1], got {p}"
            )));
        }
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidModel(format!("weight scale tau must be positive, got {tau}")));
        }
        let mut degree = vec![0usize; graph.n()];
        for &(u, v) in graph.edges() {
            degree[u] += 1;
            degree[v] += 1;
        }
        let max_degree = degree.iter().copied().max().unwrap_or(0);
        if tau < (max_degree as f64) {
            return Err(Error::InvalidModel(format!(
                "tau = {tau} is below the maximum supergraph degree {max_degree}; \
                 diagonal weights could go negative"
            )));
        }
        Ok(Self::BernoulliEdges { graph, p, tau })
    }

    /// Single-edge gossip model; the supergraph needs at least one edge.
    pub fn gossip(graph: Supergraph) -> Result<Self> {
        if graph.edges().is_empty() {
            return Err(Error::InvalidModel(
                "gossip needs a supergraph with at least one edge".into(),
            ));
        }
        Ok(Self::Gossip { graph })
    }

    /// Deterministic uniform averaging over `n` nodes.
    pub fn perfect_averaging(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("a network needs at least one node".into()));
        }
        Ok(Self::PerfectAveraging { n })
    }

    /// A fixed matrix, verified square, nonnegative, and doubly stochastic.
    pub fn from_matrix(matrix: Array2<S>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidModel(format!(
                "static mixing matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        verify_doubly_stochastic(&matrix, S::from(DOUBLY_STOCHASTIC_TOL).unwrap())?;
        Ok(Self::Static { matrix })
    }

    /// Number of agents the model connects.
    pub fn n(&self) -> usize {
        match self {
            Self::BernoulliEdges { graph, .. } | Self::Gossip { graph } => graph.n(),
            Self::PerfectAveraging { n } => *n,
            Self::Static { matrix } => matrix.nrows(),
        }
    }

    /// Whether every round produces the same matrix.
    pub fn is_deterministic(&self) -> bool {
        match self {
            Self::BernoulliEdges { graph, p, .. } => {
                graph.edges().is_empty() || *p == 0.0 || *p == 1.0
            }
            Self::Gossip { graph } => graph.edges().len() == 1,
            Self::PerfectAveraging { .. } | Self::Static { .. } => true,
        }
    }

    /// Draws one round's mixing matrix.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MixingMatrix<S>> {
        match self {
            Self::BernoulliEdges { graph, p, tau } => {
                let n = graph.n();
                let mut entries = Array2::<S>::zeros((n, n));
                let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
                let mut degree = vec![0usize; n];
                let tau_s = S::from(*tau).unwrap();
                let weight = S::one() / tau_s;
                for &(u, v) in graph.edges() {
                    // Always consume one draw per edge so the stream layout
                    // is independent of p.
                    let active = rng.random_range(0.0..1.0) < *p;
                    if active {
                        entries[[u, v]] = weight;
                        entries[[v, u]] = weight;
                        neighbors[u].push(v);
                        neighbors[v].push(u);
                        degree[u] += 1;
                        degree[v] += 1;
                    }
                }
                for i in 0..n {
                    let deg = S::from(degree[i] as f64).unwrap();
                    // (tau - deg) / tau rather than 1 - deg/tau: with
                    // tau = deg + residual this keeps the diagonal exactly
                    // equal to residual/tau, matching the off-diagonal
                    // weights bit for bit when the graph is fully active.
                    let diag = (tau_s - deg) / tau_s;
                    if diag < S::zero() {
                        return Err(Error::InvalidModel(format!(
                            "node {i} reached degree {} above tau = {tau}; \
                             diagonal weight would be negative",
                            degree[i]
                        )));
                    }
                    entries[[i, i]] = diag;
                }
                Ok(MixingMatrix { entries, active_neighbors: neighbors })
            }
            Self::Gossip { graph } => {
                let n = graph.n();
                let mut entries = Array2::<S>::eye(n);
                let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
                let pick = rng.random_range(0..graph.edges().len());
                let (u, v) = graph.edges()[pick];
                let half = S::from(0.5).unwrap();
                entries[[u, u]] = half;
                entries[[v, v]] = half;
                entries[[u, v]] = half;
                entries[[v, u]] = half;
                neighbors[u].push(v);
                neighbors[v].push(u);
                Ok(MixingMatrix { entries, active_neighbors: neighbors })
            }
            Self::PerfectAveraging { n } => {
                let weight = S::one() / S::from(*n as f64).unwrap();
                let entries = Array2::<S>::from_elem((*n, *n), weight);
                let neighbors = (0..*n)
                    .map(|i| (0..*n).filter(|&j| j != i).collect())
                    .collect();
                Ok(MixingMatrix { entries, active_neighbors: neighbors })
            }
            Self::Static { matrix } => {
                let n = matrix.nrows();
                let neighbors = (0..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&j| j != i && matrix[[i, j]] != S::zero())
                            .collect()
                    })
                    .collect();
                Ok(MixingMatrix { entries: matrix.clone(), active_neighbors: neighbors })
            }
        }
    }
}

/// Checks that `m` is square with nonnegative entries and that every row and
/// column sums to one within `tol`.
pub fn verify_doubly_stochastic<S: Scalar>(m: &Array2<S>, tol: S) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotDoublyStochastic(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let e = m[[i, j]];
            if !e.is_finite() || e < -tol {
                return Err(Error::NotDoublyStochastic(format!(
                    "entry ({i}, {j}) = {:e} is negative or non-finite",
                    e.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
    }
    for i in 0..n {
        let row: S = (0..n).map(|j| m[[i, j]]).sum();
        if (row - S::one()).abs() > tol {
            return Err(Error::NotDoublyStochastic(format!(
                "row {i} sums to {:e}",
                row.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let col: S = (0..n).map(|j| m[[j, i]]).sum();
        if (col - S::one()).abs() > tol {
            return Err(Error::NotDoublyStochastic(format!(
                "column {i} sums to {:e}",
                col.to_f64().unwrap_or(f64::NAN)
            )));
        }
    }
    Ok(())
}

/// Result of estimating `beta = sqrt(rho(E[P^T P] - 11^T/n))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaEstimate {
    /// The estimate from the full sample (exact for deterministic models).
    pub beta: f64,
    /// Estimate recomputed from the first half of the samples.
    pub half_one: f64,
    /// Estimate recomputed from the second half of the samples.
    pub half_two: f64,
    /// `|half_one - half_two|`, a crude Monte Carlo stability indicator.
    pub spread: f64,
    /// Samples actually used (1 for deterministic models).
    pub samples: usize,
    /// Set when beta is so close to one that no usable step size exists.
    pub flagged: Option<String>,
}

/// Spectral radius of a symmetric deviation matrix, floored to zero when it
/// is below the numerical resolution of the estimate itself.  Accumulating
/// and averaging `n x n` products leaves residuals of order `n^2 * eps`
/// around an exact zero; anything below `16 n^2 eps * scale` is noise.
fn floored_sqrt_radius(deviation: &Array2<f64>, n: usize) -> Result<f64> {
    let radius = symmetric_spectral_radius(deviation)?;
    let scale = deviation.iter().fold(1.0_f64, |m, &v| m.max(v.abs())).max(1.0);
    let floor = 16.0 * (n as f64) * (n as f64) * f64::EPSILON * scale;
    if radius <= floor {
        Ok(0.0)
    } else {
        Ok(radius.sqrt())
    }
}

fn beta_from_mean(mean_gram: &Array2<f64>, n: usize) -> Result<f64> {
    let uniform = 1.0 / n as f64;
    let mut deviation = mean_gram.clone();
    deviation.iter_mut().for_each(|v| *v -= uniform);
    floored_sqrt_radius(&deviation, n)
}

/// Estimates beta for a mixing model.
///
/// Deterministic models are resolved with a single exact sample.  Random
/// models are estimated by Monte Carlo: the mean of `P^T P` over `samples`
/// draws seeded from `seed`, with two half-sample re-estimates reported so
/// callers can judge stability.  Estimates within `BETA_FLAG_THRESHOLD` of
/// one are flagged as unusable for step certification.
pub fn beta_estimate<S: Scalar>(
    model: &MixingModel<S>,
    samples: usize,
    seed: u64,
) -> Result<BetaEstimate> {
    let n = model.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gram_f64 = |mix: &MixingMatrix<S>| -> Array2<f64> {
        let p = mix.entries.mapv(|v| v.to_f64().unwrap_or(f64::NAN));
        p.t().dot(&p)
    };
    let (beta, half_one, half_two, used) = if model.is_deterministic() {
        let mix = model.sample(&mut rng)?;
        verify_doubly_stochastic(&mix.entries, S::from(DOUBLY_STOCHASTIC_TOL).unwrap())?;
        let beta = beta_from_mean(&gram_f64(&mix), n)?;
        (beta, beta, beta, 1)
    } else {
        if samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "Monte Carlo beta estimation needs at least 2 samples, got {samples}"
            )));
        }
        let first = samples / 2;
        let mut sum_first = Array2::<f64>::zeros((n, n));
        let mut sum_second = Array2::<f64>::zeros((n, n));
        for k in 0..samples {
            let mix = model.sample(&mut rng)?;
            let gram = gram_f64(&mix);
            if k < first {
                sum_first += &gram;
            } else {
                sum_second += &gram;
            }
        }
        let mut total = &sum_first + &sum_second;
        total /= samples as f64;
        sum_first /= first as f64;
        sum_second /= (samples - first) as f64;
        let beta = beta_from_mean(&total, n)?;
        let half_one = beta_from_mean(&sum_first, n)?;
        let half_two = beta_from_mean(&sum_second, n)?;
        (beta, half_one, half_two, samples)
    };
    let flagged = if beta >= 1.0 - BETA_FLAG_THRESHOLD {
        Some(format!(
            "beta = {beta:.17} is within {BETA_FLAG_THRESHOLD:e} of one; \
             the model cannot contract disagreement and no step size can be certified"
        ))
    } else {
        None
    };
    Ok(BetaEstimate {
        beta,
        half_one,
        half_two,
        spread: (half_one - half_two).abs(),
        samples: used,
        flagged,
    })
}

/// Spectral radius of the 2x2 coupling matrix
/// `[[beta, beta], [a*l*(beta + 1), beta*(a*l + 1)]]`
/// that propagates (consensus error, tracker error) across rounds.
pub fn coupling_spectral_radius(a: f64, l: f64, beta: f64) -> f64 {
    spectral_radius_2x2(beta, beta, a * l * (beta + 1.0), beta * (a * l + 1.0))
}

/// The full feasibility predicate behind the step-size certificate: the
/// coupling matrix must be a contraction, the step must clear the
/// smoothness-plus-consensus threshold, and (for beta > 0) stay below the
/// consensus step limit.  Monotone in `a`: shrinking a feasible step keeps
/// it feasible.
pub fn dda_stepsize_feasible(a: f64, l: f64, beta: f64) -> bool {
    if !a.is_finite() || a <= 0.0 {
        return false;
    }
    let rho = coupling_spectral_radius(a, l, beta);
    if !(rho < 1.0) {
        return false;
    }
    let smooth_term = 0.5 + 4.0 / (3.0 * (1.0 - rho));
    let consensus_term = if beta > 0.0 { 2.0 * beta / ((1.0 - beta) * (1.0 - beta)) } else { 0.0 };
    if 1.0 / a <= l * smooth_term.max(consensus_term) {
        return false;
    }
    if beta > 0.0 && a >= (1.0 - beta) * (1.0 - beta) / (2.0 * beta * l) {
        return false;
    }
    true
}

/// Outcome of the step-size certification search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepCertificate {
    /// Smoothness constant the certificate was computed for.
    pub lipschitz: f64,
    /// Network beta the certificate was computed for.
    pub beta: f64,
    /// Supremum of feasible steps located by bisection.
    pub a_max: f64,
    /// `a_max` shrunk by a relative margin; the value to actually run with.
    pub a_certified: f64,
    /// Coupling-matrix spectral radius at the certified step.
    pub rho_at_certified: f64,
    /// Upper step limit from the consensus contraction requirement
    /// (`infinity` when beta = 0).
    pub consensus_step_limit: f64,
    /// The centralized descent threshold `2 / lipschitz`, for reference.
    pub descent_threshold: f64,
    /// Whether a usable positive step exists.
    pub feasible: bool,
}

impl std::fmt::Display for StepCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "lipschitz            = {:.12e}", self.lipschitz)?;
        writeln!(f, "beta                 = {:.12e}", self.beta)?;
        writeln!(f, "a_max                = {:.12e}", self.a_max)?;
        writeln!(f, "a_certified          = {:.12e}", self.a_certified)?;
        writeln!(f, "rho_at_certified     = {:.12e}", self.rho_at_certified)?;
        writeln!(f, "consensus_step_limit = {:.12e}", self.consensus_step_limit)?;
        writeln!(f, "descent_threshold    = {:.12e}", self.descent_threshold)?;
        write!(f, "feasible             = {}", self.feasible)
    }
}

/// Finds the largest prox step the distributed convergence certificate
/// admits for smoothness `l` and network parameter `beta`, by bisecting the
/// monotone predicate `dda_stepsize_feasible` on `(0, 2/l)`.
pub fn certify_stepsize_dda(l: f64, beta: f64) -> Result<StepCertificate> {
    if !l.is_finite() || l <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "smoothness constant must be positive and finite, got {l}"
        )));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "beta must be finite and nonnegative, got {beta}"
        )));
    }
    let descent_threshold = 2.0 / l;
    let consensus_step_limit = if beta > 0.0 {
        (1.0 - beta) * (1.0 - beta) / (2.0 * beta * l)
    } else {
        f64::INFINITY
    };
    let mut lo = 0.0_f64;
    let mut hi = descent_threshold;
    if beta < 1.0 {
        for _ in 0..CERTIFY_BISECTION_ITERS {
            let mid = 0.5 * (lo + hi);
            if dda_stepsize_feasible(mid, l, beta) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let a_max = lo;
    let mut a_certified = a_max * (1.0 - CERTIFY_SHRINK);
    let mut feasible = a_certified >= CERTIFY_MIN_STEP && dda_stepsize_feasible(a_certified, l, beta);
    if !feasible {
        a_certified = 0.0;
        feasible = false;
    }
    Ok(StepCertificate {
        lipschitz: l,
        beta,
        a_max,
        a_certified,
        rho_at_certified: if feasible { coupling_spectral_radius(a_certified, l, beta) } else { f64::NAN },
        consensus_step_limit,
        descent_threshold,
        feasible,
    })
}

/// JSON-facing description of a network model.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkConfig {
    /// Bernoulli edge activations on the complete supergraph.
    Bernoulli {
        n: usize,
        p: f64,
        /// Weight scale; defaults to `n` when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        seed: u64,
    },
    /// Single-edge gossip on the complete supergraph.
    Gossip { n: usize, seed: u64 },
    /// Deterministic uniform averaging.
    Perfect {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// A fixed doubly stochastic matrix, given row by row.
    Static {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl NetworkConfig {
    /// Number of agents described by the configuration.
    pub fn n(&self) -> usize {
        match self {
            Self::Bernoulli { n, .. } | Self::Gossip { n, .. } | Self::Perfect { n, .. } => *n,
            Self::Static { matrix, .. } => matrix.len(),
        }
    }

    /// Seed for the mixing stream (zero where irrelevant).
    pub fn seed(&self) -> u64 {
        match self {
            Self::Bernoulli { seed, .. } | Self::Gossip { seed, .. } => *seed,
            Self::Perfect { seed, .. } | Self::Static { seed, .. } => seed.unwrap_or(0),
        }
    }

    /// Instantiates the described model with `f64` entries.
    pub fn build(&self) -> Result<MixingModel<f64>> {
        match self {
            Self::Bernoulli { n, p, tau, .. } => {
                let graph = Supergraph::complete(*n)?;
                MixingModel::bernoulli(graph, *p, tau.unwrap_or(*n as f64))
            }
            Self::Gossip { n, .. } => MixingModel::gossip(Supergraph::complete(*n)?),
            Self::Perfect { n, .. } => MixingModel::perfect_averaging(*n),
            Self::Static { matrix, .. } => {
                let n = matrix.len();
                if n == 0 || matrix.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidModel(
                        "static matrix rows must all have length equal to the row count".into(),
                    ));
                }
                let mut entries = Array2::<f64>::zeros((n, n));
                for (i, row) in matrix.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        entries[[i, j]] = v;
                    }
                }
                MixingModel::from_matrix(entries)
            }
        }
    }
}

/// Writes a matrix as bare CSV rows (no header), useful for inspecting
/// sampled mixing matrices.
pub fn write_matrix_csv<S: Scalar, W: IoWrite>(m: &Array2<S>, mut out: W) -> Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| crate::trace::fmt_float(m[[i, j]].to_f64().unwrap_or(f64::NAN)))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Mean disagreement contraction over one mixing round, for diagnostics and
/// tests: draws `samples` matrices and returns the sample mean and standard
/// deviation of `||P v||^2` for a fixed zero-mean vector `v`.
pub fn contraction_probe<S: Scalar, R: Rng + ?Sized>(
    model: &MixingModel<S>,
    v: &Array1<S>,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if v.len() != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), got: v.len() });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("contraction probe needs at least one sample".into()));
    }
    let mut sum = 0.0_f64;
    let mut sum_sq = 0.0_f64;
    for _ in 0..samples {
        let mix = model.sample(rng)?;
        let image = mix.entries.dot(v);
        let norm_sq = image.iter().map(|&x| x * x).sum::<S>().to_f64().unwrap_or(f64::NAN);
        sum += norm_sq;
        sum_sq += norm_sq * norm_sq;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    Ok((mean, var.sqrt()))
}
