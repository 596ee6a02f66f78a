//! Experiment execution: config resolution, parallel per-seed runs,
//! cross-seed aggregation, and artifact writing.
//!
//! One experiment = one resolved setup (instance, set, network model,
//! step size, lower bound) executed once per seed offset. Offsets map to
//! independent mixing streams; the instance and start point are shared, so
//! seed-to-seed scatter isolates network randomness. Artifacts per run
//! directory:
//!
//! * `config.json` — the exact config, echoed back (parses to the same
//!   config).
//! * `trace_<offset>.csv` — one per-round trace per seed offset.
//! * `aggregate.csv` — per-round mean and sample standard deviation of
//!   every trace column across seeds.
//! * `summary.json` — resolved constants (step, contraction factor,
//!   decay constant), per-run outcomes, final aggregates, wall time, and
//!   the config echo.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dualavg_core::cda::{run_cda, CdaConfig, CdaReport};
use dualavg_core::dda::{run_dda, run_dpga, DdaConfig, DdaReport, DpgaConfig, DpgaReport};
use dualavg_core::monitor::Violation;
use dualavg_core::network::{
    beta_estimate, certify_stepsize_dda, coupling_spectral_radius, BetaEstimate, StepCertificate,
};
use dualavg_core::trace::{fmt_float, CdaTrace, DdaTrace, DpgaTrace};
use dualavg_core::{FeasibleSet64, MixingModel64, ObjectiveSplit64, ProximalSetup64};

use crate::config::{derive_stream_seed, AlgorithmKind, ExperimentConfig, NumberOrKeyword};
use crate::error::{CliError, Result};

/// Everything a config resolves to before any run starts.
#[derive(Debug)]
pub struct ResolvedSetup {
    pub objective: ObjectiveSplit64,
    pub set: FeasibleSet64,
    /// Present for distributed algorithms.
    pub model: Option<MixingModel64>,
    pub lipschitz: f64,
    /// Proximal center / common start point.
    pub center: Array1<f64>,
    /// Resolved dual-averaging step, `None` for the baseline.
    pub a: Option<f64>,
    /// `"explicit"` or `"certified"`.
    pub a_source: Option<&'static str>,
    /// Present when the step came from certification.
    pub certificate: Option<StepCertificate>,
    /// Network contraction estimate (distributed dual averaging only).
    pub beta: Option<BetaEstimate>,
    /// Coupling spectral radius at the resolved step.
    pub rho: Option<f64>,
    pub f_lower: Option<f64>,
    /// `"explicit"` or `"auto"`.
    pub f_lower_source: Option<&'static str>,
    /// Baseline step, `None` otherwise.
    pub eta: Option<f64>,
}

/// The engine-specific outcome of one run.
pub enum RunReport {
    Cda(CdaReport<f64>),
    Dda(Box<DdaReport<f64>>),
    Dpga(DpgaReport<f64>),
}

impl RunReport {
    /// Rows in the trace (round zero included).
    pub fn trace_len(&self) -> usize {
        match self {
            Self::Cda(r) => r.trace.len(),
            Self::Dda(r) => r.trace.len(),
            Self::Dpga(r) => r.trace.len(),
        }
    }

    /// A named trace column (`t` included).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        match self {
            Self::Cda(r) => r.trace.column(name),
            Self::Dda(r) => r.trace.column(name),
            Self::Dpga(r) => r.trace.column(name),
        }
    }

    /// Data columns of this report's trace, `t` excluded.
    pub fn data_column_names(&self) -> &'static [&'static str] {
        match self {
            Self::Cda(_) => &CdaTrace::HEADER[1..],
            Self::Dda(_) => &DdaTrace::HEADER[1..],
            Self::Dpga(_) => &DpgaTrace::HEADER[1..],
        }
    }

    /// Recorded invariant violations (the baseline has no monitors).
    pub fn violations(&self) -> &[Violation] {
        match self {
            Self::Cda(r) => &r.violations,
            Self::Dda(r) => &r.violations,
            Self::Dpga(_) => &[],
        }
    }

    /// Abort diagnostic, when the run hit non-finite values.
    pub fn aborted(&self) -> Option<&str> {
        match self {
            Self::Cda(r) => r.aborted.as_deref(),
            Self::Dda(r) => r.aborted.as_deref(),
            Self::Dpga(_) => None,
        }
    }

    /// Writes the trace as CSV.
    pub fn write_trace_csv(&self, path: &Path) -> dualavg_core::Result<()> {
        match self {
            Self::Cda(r) => r.trace.to_csv_path(path),
            Self::Dda(r) => r.trace.to_csv_path(path),
            Self::Dpga(r) => r.trace.to_csv_path(path),
        }
    }

    /// The headline metric column for this engine.
    pub fn headline_column(&self) -> &'static str {
        match self {
            Self::Cda(_) => "f",
            Self::Dda(_) | Self::Dpga(_) => "cost",
        }
    }

    fn last_row_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        let t = self.column("t").expect("t column exists");
        obj.insert("t".into(), json!(t.last().copied().map(|v| v as usize)));
        for name in self.data_column_names() {
            let col = self.column(name).expect("declared column exists");
            obj.insert((*name).into(), json!(col.last().copied()));
        }
        Value::Object(obj)
    }

    fn extras_json(&self) -> Value {
        match self {
            Self::Cda(r) => json!({
                "stepsize_ok": r.stepsize_ok,
                "stopped_early": r.stopped_early,
            }),
            Self::Dda(r) => json!({
                "stationary_checks": r.stationary_checks,
                "cost_descent_skipped": r.cost_descent_skipped,
            }),
            Self::Dpga(r) => json!({ "diverged": r.diverged }),
        }
    }
}

/// One completed run.
pub struct SeedRun {
    pub offset: u64,
    /// Mixing-stream seed derived from the network seed and the offset.
    pub stream_seed: u64,
    pub report: RunReport,
}

/// Per-round mean and sample standard deviation of every trace column
/// across seeds.
pub struct Aggregate {
    /// Data column names (`t` excluded), in trace order.
    pub columns: Vec<&'static str>,
    pub t: Vec<usize>,
    /// `means[c][i]` pairs with `columns[c]` and `t[i]`.
    pub means: Vec<Vec<f64>>,
    pub stds: Vec<Vec<f64>>,
    /// True when runs had different lengths (early stop) and rows beyond
    /// the shortest run were dropped.
    pub truncated: bool,
}

impl Aggregate {
    /// The per-round means of a named column.
    pub fn mean(&self, column: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .position(|c| *c == column)
            .map(|i| self.means[i].as_slice())
    }

    /// The per-round sample standard deviations of a named column.
    pub fn std(&self, column: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .position(|c| *c == column)
            .map(|i| self.stds[i].as_slice())
    }

    /// CSV form: `t,<col>_mean,<col>_std,...` with round-trip floats.
    pub fn to_csv_string(&self) -> String {
        let mut header = vec!["t".to_string()];
        for c in &self.columns {
            header.push(format!("{c}_mean"));
            header.push(format!("{c}_std"));
        }
        let mut out = header.join(",");
        out.push('\n');
        for (i, &t) in self.t.iter().enumerate() {
            out.push_str(&t.to_string());
            for c in 0..self.columns.len() {
                out.push(',');
                out.push_str(&fmt_float(self.means[c][i]));
                out.push(',');
                out.push_str(&fmt_float(self.stds[c][i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Everything [`execute`] produces, ready to write or inspect in-process.
pub struct Artifacts {
    pub setup: ResolvedSetup,
    pub runs: Vec<SeedRun>,
    pub aggregate: Aggregate,
    pub summary: Value,
    pub wall_seconds: f64,
}

impl Artifacts {
    /// Offsets of runs that aborted on non-finite values.
    pub fn aborted_offsets(&self) -> Vec<u64> {
        self.runs
            .iter()
            .filter(|r| r.report.aborted().is_some())
            .map(|r| r.offset)
            .collect()
    }
}

/// Validates the config and materializes instance, set, model, step size,
/// and lower bound.
///
/// Step resolution: an explicit number is taken as-is; `"certified"` means
/// `1/L` for the centralized engine and the certified largest usable step
/// (from the contraction estimate) for the distributed one. Lower-bound
/// resolution: `"auto"` uses the closed-form bound over the compact set.
pub fn resolve(config: &ExperimentConfig) -> Result<ResolvedSetup> {
    config.validate()?;
    let objective = config
        .problem
        .build()
        .map_err(|e| CliError::Config(format!("problem: {e}")))?;
    let lipschitz = objective.lipschitz();
    let dim = objective.dim();
    let set = config.set.build(dim)?;
    let model = match &config.network {
        Some(net) => Some(
            net.build()
                .map_err(|e| CliError::Config(format!("network: {e}")))?,
        ),
        None => None,
    };
    let center = match &config.algorithm.center {
        Some(v) => Array1::from_vec(v.clone()),
        None => Array1::zeros(dim),
    };
    let kind = config.algorithm.kind;

    // The distributed dual-averaging engine always wants the contraction
    // estimate: it feeds the coupling radius, the per-round monitors, and
    // the decay constant even when the step is explicit.
    let beta = if kind == AlgorithmKind::Dda {
        let net = config.network.as_ref().expect("validated: dda has a network");
        Some(beta_estimate(
            model.as_ref().expect("validated: dda has a model"),
            config.algorithm.beta_samples,
            net.seed(),
        )?)
    } else {
        None
    };

    let (a, a_source, certificate) = match (&config.algorithm.a, kind) {
        (Some(NumberOrKeyword::Number(v)), _) => (Some(*v), Some("explicit"), None),
        (Some(NumberOrKeyword::Keyword(_)), AlgorithmKind::Cda) => {
            (Some(1.0 / lipschitz), Some("certified"), None)
        }
        (Some(NumberOrKeyword::Keyword(_)), AlgorithmKind::Dda) => {
            let est = beta.as_ref().expect("dda estimated beta");
            let cert = certify_stepsize_dda(lipschitz, est.beta)?;
            if !cert.feasible {
                return Err(CliError::Numerical(format!(
                    "no certifiable step size: contraction factor {:.6} leaves no usable \
                     range below the consensus step limit {:.3e}",
                    est.beta, cert.consensus_step_limit
                )));
            }
            (Some(cert.a_certified), Some("certified"), Some(cert))
        }
        (None, _) => (None, None, None),
        (Some(NumberOrKeyword::Keyword(_)), AlgorithmKind::Dpga) => {
            unreachable!("validated: dpga rejects a")
        }
    };

    let rho = match (kind, a, &beta) {
        (AlgorithmKind::Dda, Some(step), Some(est)) => {
            Some(coupling_spectral_radius(step, lipschitz, est.beta))
        }
        _ => None,
    };

    let (f_lower, f_lower_source) = match &config.algorithm.f_lower {
        None => (None, None),
        Some(NumberOrKeyword::Number(v)) => (Some(*v), Some("explicit")),
        Some(NumberOrKeyword::Keyword(_)) => match objective.value_lower_bound(&set) {
            Some(v) => (Some(v), Some("auto")),
            None => {
                return Err(CliError::Config(
                    "f_lower \"auto\" needs a compact set; supply a number instead".into(),
                ))
            }
        },
    };

    Ok(ResolvedSetup {
        objective,
        set,
        model,
        lipschitz,
        center,
        a,
        a_source,
        certificate,
        beta,
        rho,
        f_lower,
        f_lower_source,
        eta: config.algorithm.eta,
    })
}

/// Resolves the config and runs it once per seed offset (in parallel),
/// returning traces, aggregates, and the summary document.
pub fn execute(config: &ExperimentConfig) -> Result<Artifacts> {
    let started = Instant::now();
    let setup = resolve(config)?;
    let kind = config.algorithm.kind;
    let prox = match setup.a {
        Some(a) => Some(
            ProximalSetup64::new(setup.center.clone(), a)
                .map_err(|e| CliError::Config(format!("step: {e}")))?,
        ),
        None => None,
    };
    let network_seed = config.network.as_ref().map(|n| n.seed()).unwrap_or(0);

    let cda_config = CdaConfig {
        rounds: config.algorithm.rounds,
        f_lower: setup.f_lower,
        monitors: config.algorithm.monitors,
        early_stop: config.algorithm.early_stop,
    };
    let dda_config = DdaConfig {
        rounds: config.algorithm.rounds,
        beta: setup.beta.as_ref().map(|b| b.beta),
        f_lower: setup.f_lower,
        monitors: config.algorithm.monitors,
    };
    let dpga_config = DpgaConfig {
        eta: setup.eta.unwrap_or(0.0),
        rounds: config.algorithm.rounds,
    };

    let run_one = |offset: u64| -> Result<SeedRun> {
        let stream_seed = derive_stream_seed(network_seed, offset);
        let report = match kind {
            AlgorithmKind::Cda => RunReport::Cda(run_cda(
                &setup.objective,
                prox.as_ref().expect("cda resolved a step"),
                &setup.set,
                &cda_config,
            )?),
            AlgorithmKind::Dda => {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
                RunReport::Dda(Box::new(run_dda(
                    &setup.objective,
                    prox.as_ref().expect("dda resolved a step"),
                    &setup.set,
                    setup.model.as_ref().expect("validated: dda has a model"),
                    &dda_config,
                    &mut rng,
                )?))
            }
            AlgorithmKind::Dpga => {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
                let starts = vec![setup.center.clone(); setup.objective.n()];
                RunReport::Dpga(run_dpga(
                    &setup.objective,
                    &setup.set,
                    setup.model.as_ref().expect("validated: dpga has a model"),
                    &starts,
                    &dpga_config,
                    &mut rng,
                )?)
            }
        };
        Ok(SeedRun {
            offset,
            stream_seed,
            report,
        })
    };

    let runs = run_parallel(&config.seeds, &run_one)?;
    let aggregate = aggregate_runs(&runs)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    let summary = build_summary(config, &setup, &runs, &aggregate, wall_seconds);
    Ok(Artifacts {
        setup,
        runs,
        aggregate,
        summary,
        wall_seconds,
    })
}

/// Runs one closure per offset across the available cores, preserving
/// offset order in the result.
fn run_parallel<F>(offsets: &[u64], run_one: &F) -> Result<Vec<SeedRun>>
where
    F: Fn(u64) -> Result<SeedRun> + Sync,
{
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(offsets.len())
        .max(1);
    if workers == 1 {
        return offsets.iter().map(|&o| run_one(o)).collect();
    }
    let mut slots: Vec<Option<Result<SeedRun>>> = Vec::with_capacity(offsets.len());
    slots.resize_with(offsets.len(), || None);
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for w in 0..workers {
            handles.push(scope.spawn(move || -> Vec<(usize, Result<SeedRun>)> {
                (w..offsets.len())
                    .step_by(workers)
                    .map(|i| (i, run_one(offsets[i])))
                    .collect()
            }));
        }
        for handle in handles {
            let part = handle
                .join()
                .map_err(|_| CliError::Numerical("a worker thread panicked".into()))?;
            for (i, r) in part {
                slots[i] = Some(r);
            }
        }
        Ok(())
    })?;
    slots
        .into_iter()
        .map(|s| s.expect("every index was scheduled"))
        .collect()
}

/// Cross-seed mean/std per round for every trace column.
pub fn aggregate_runs(runs: &[SeedRun]) -> Result<Aggregate> {
    let first = runs
        .first()
        .ok_or_else(|| CliError::Numerical("no runs to aggregate".into()))?;
    let len = runs
        .iter()
        .map(|r| r.report.trace_len())
        .min()
        .expect("non-empty");
    if len == 0 {
        return Err(CliError::Numerical("a run produced an empty trace".into()));
    }
    let truncated = runs.iter().any(|r| r.report.trace_len() != len);
    let columns: Vec<&'static str> = first.report.data_column_names().to_vec();
    let t: Vec<usize> = first
        .report
        .column("t")
        .expect("t column exists")
        .iter()
        .take(len)
        .map(|&v| v as usize)
        .collect();

    let n = runs.len() as f64;
    let mut means = vec![vec![0.0_f64; len]; columns.len()];
    let mut stds = vec![vec![0.0_f64; len]; columns.len()];
    for (c, name) in columns.iter().enumerate() {
        let series: Vec<Vec<f64>> = runs
            .iter()
            .map(|r| {
                r.report
                    .column(name)
                    .expect("all runs share one engine's columns")
            })
            .collect();
        for i in 0..len {
            // Sum in run order so the aggregate is exactly recomputable
            // from the per-seed CSVs.
            let mut sum = 0.0;
            for s in &series {
                sum += s[i];
            }
            let mean = sum / n;
            means[c][i] = mean;
            stds[c][i] = if runs.len() < 2 {
                0.0
            } else {
                let mut ss = 0.0;
                for s in &series {
                    let d = s[i] - mean;
                    ss += d * d;
                }
                (ss / (n - 1.0)).sqrt()
            };
        }
    }
    Ok(Aggregate {
        columns,
        t,
        means,
        stds,
        truncated,
    })
}

fn violations_json(vs: &[Violation]) -> Value {
    let mut by_kind: BTreeMap<String, usize> = BTreeMap::new();
    for v in vs {
        *by_kind.entry(v.kind.to_string()).or_insert(0) += 1;
    }
    json!({ "total": vs.len(), "by_kind": by_kind })
}

fn build_summary(
    config: &ExperimentConfig,
    setup: &ResolvedSetup,
    runs: &[SeedRun],
    aggregate: &Aggregate,
    wall_seconds: f64,
) -> Value {
    let n = setup.objective.n();
    let runs_json: Vec<Value> = runs
        .iter()
        .map(|r| {
            json!({
                "offset": r.offset,
                "stream_seed": r.stream_seed,
                "rounds_completed": r.report.trace_len().saturating_sub(1),
                "violations": violations_json(r.report.violations()),
                "aborted": r.report.aborted(),
                "final": r.report.last_row_json(),
                "details": r.report.extras_json(),
            })
        })
        .collect();

    let mut final_agg = serde_json::Map::new();
    if let Some(&t_last) = aggregate.t.last() {
        final_agg.insert("t".into(), json!(t_last));
    }
    for (c, name) in aggregate.columns.iter().enumerate() {
        final_agg.insert(format!("{name}_mean"), json!(aggregate.means[c].last().copied()));
        final_agg.insert(format!("{name}_std"), json!(aggregate.stds[c].last().copied()));
    }

    // Per-agent average cost and its network total, for distributed runs.
    let cost_final = aggregate
        .mean("cost")
        .and_then(|m| m.last().copied())
        .map(|cost| json!({ "cost_avg_final": cost, "cost_total_final": cost * n as f64 }));

    let dda0 = runs.first().and_then(|r| match &r.report {
        RunReport::Dda(d) => Some(d),
        _ => None,
    });

    json!({
        "name": config.name,
        "algorithm": config.algorithm.kind.name(),
        "agents": n,
        "dim": setup.objective.dim(),
        "rounds": config.algorithm.rounds,
        "seeds": config.seeds,
        "lipschitz": setup.lipschitz,
        "lipschitz_converged": setup.objective.lipschitz_converged(),
        "step": setup.a.map(|a| json!({
            "a": a,
            "source": setup.a_source,
            "certificate": &setup.certificate,
        })),
        "eta": setup.eta,
        "network": setup.beta.as_ref().map(|b| json!({
            "beta": b.beta,
            "beta_spread": b.spread,
            "beta_samples": b.samples,
            "beta_flagged": b.flagged,
            "rho": setup.rho,
        })),
        "f_lower": setup.f_lower.map(|v| json!({
            "value": v,
            "source": setup.f_lower_source,
        })),
        "dispersion_sq": dda0.map(|d| d.dispersion_sq),
        "f_y0": dda0.map(|d| d.f_y0),
        "c_constant": dda0.and_then(|d| d.c_constant),
        "runs": runs_json,
        "final": Value::Object(final_agg),
        "cost": cost_final,
        "violations_total": runs.iter().map(|r| r.report.violations().len()).sum::<usize>(),
        "aborted_offsets": runs
            .iter()
            .filter(|r| r.report.aborted().is_some())
            .map(|r| r.offset)
            .collect::<Vec<u64>>(),
        "truncated_aggregate": aggregate.truncated,
        "wall_time_seconds": wall_seconds,
        "config": serde_json::to_value(config).expect("config serializes"),
    })
}

/// Writes config echo, per-seed traces, the aggregate CSV, and the summary
/// into `dir`, creating it if needed. Returns the written paths.
pub fn write_artifacts(
    config: &ExperimentConfig,
    artifacts: &Artifacts,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let config_path = dir.join("config.json");
    std::fs::write(&config_path, config.to_json_pretty() + "\n")?;
    written.push(config_path);

    for run in &artifacts.runs {
        let path = dir.join(format!("trace_{}.csv", run.offset));
        run.report
            .write_trace_csv(&path)
            .map_err(|e| CliError::Numerical(format!("writing {}: {e}", path.display())))?;
        written.push(path);
    }

    let agg_path = dir.join("aggregate.csv");
    std::fs::write(&agg_path, artifacts.aggregate.to_csv_string())?;
    written.push(agg_path);

    let summary_path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&artifacts.summary).expect("summary serializes");
    std::fs::write(&summary_path, text + "\n")?;
    written.push(summary_path);

    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AlgorithmConfig, SetConfig};
    use dualavg_core::network::NetworkConfig;
    use dualavg_core::objective::InstanceSpec;

    fn tiny_dda_config() -> ExperimentConfig {
        ExperimentConfig {
            name: "tiny-dda".into(),
            problem: InstanceSpec::Pca {
                n: 3,
                rows: 2,
                dim: 4,
                seed: 3,
                entries: None,
            },
            set: SetConfig::Ball {
                radius: 1.0,
                center: None,
            },
            network: Some(NetworkConfig::Bernoulli {
                n: 3,
                p: 0.5,
                tau: None,
                seed: 2,
            }),
            algorithm: AlgorithmConfig {
                kind: AlgorithmKind::Dda,
                a: Some(NumberOrKeyword::Number(0.01)),
                eta: None,
                rounds: 8,
                monitors: true,
                early_stop: false,
                f_lower: Some(NumberOrKeyword::Keyword("auto".into())),
                center: Some(vec![0.3, 0.0, 0.0, 0.0]),
                beta_samples: 400,
            },
            seeds: vec![0, 1, 2],
            output_dir: None,
        }
    }

    fn unique_temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "dualavg-runner-{tag}-{}",
            std::process::id()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn aggregate_matches_direct_recomputation_from_traces() {
        let config = tiny_dda_config();
        let artifacts = execute(&config).unwrap();
        assert_eq!(artifacts.runs.len(), 3);
        let agg = &artifacts.aggregate;
        assert_eq!(agg.columns, &DdaTrace::HEADER[1..]);
        assert_eq!(agg.t.len(), 9, "round zero plus eight rounds");
        let costs: Vec<Vec<f64>> = artifacts
            .runs
            .iter()
            .map(|r| r.report.column("cost").unwrap())
            .collect();
        for i in 0..agg.t.len() {
            let mean = (costs[0][i] + costs[1][i] + costs[2][i]) / 3.0;
            assert_eq!(agg.mean("cost").unwrap()[i], mean, "mean at round {i}");
            let ss: f64 = costs.iter().map(|c| (c[i] - mean) * (c[i] - mean)).sum();
            assert_eq!(
                agg.std("cost").unwrap()[i],
                (ss / 2.0).sqrt(),
                "std at round {i}"
            );
        }
        // Different network streams actually produced different runs.
        assert!(agg.std("cost").unwrap().iter().any(|&s| s > 0.0));
    }

    #[test]
    fn execute_is_deterministic_per_config() {
        let config = tiny_dda_config();
        let one = execute(&config).unwrap();
        let two = execute(&config).unwrap();
        assert_eq!(
            one.aggregate.to_csv_string(),
            two.aggregate.to_csv_string()
        );
        let t1 = match &one.runs[0].report {
            RunReport::Dda(d) => d.trace.to_csv_string().unwrap(),
            _ => unreachable!(),
        };
        let t2 = match &two.runs[0].report {
            RunReport::Dda(d) => d.trace.to_csv_string().unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(t1, t2);
    }

    #[test]
    fn certified_centralized_step_is_inverse_lipschitz() {
        let mut config = tiny_dda_config();
        config.name = "tiny-cda".into();
        config.algorithm.kind = AlgorithmKind::Cda;
        config.algorithm.a = Some(NumberOrKeyword::Keyword("certified".into()));
        config.network = None;
        let setup = resolve(&config).unwrap();
        assert_eq!(setup.a.unwrap(), 1.0 / setup.lipschitz);
        assert_eq!(setup.a_source, Some("certified"));
        assert_eq!(
            setup.f_lower.unwrap(),
            setup.objective.value_lower_bound(&setup.set).unwrap()
        );
        assert_eq!(setup.f_lower_source, Some("auto"));
        assert!(setup.beta.is_none());
        assert!(setup.rho.is_none());
    }

    #[test]
    fn distributed_resolution_reports_contraction_data() {
        let mut config = tiny_dda_config();
        config.algorithm.a = Some(NumberOrKeyword::Keyword("certified".into()));
        let setup = resolve(&config).unwrap();
        let cert = setup.certificate.as_ref().unwrap();
        assert!(cert.feasible);
        assert_eq!(setup.a.unwrap(), cert.a_certified);
        let est = setup.beta.as_ref().unwrap();
        assert!(est.beta > 0.0 && est.beta < 1.0);
        assert!(setup.rho.unwrap() < 1.0);
    }

    #[test]
    fn auto_lower_bound_requires_a_compact_set() {
        let mut config = tiny_dda_config();
        config.name = "tiny-free".into();
        config.algorithm.kind = AlgorithmKind::Cda;
        config.network = None;
        config.set = SetConfig::WholeSpace;
        let err = resolve(&config).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("compact"));
    }

    #[test]
    fn artifacts_land_on_disk_and_recompute() {
        let config = tiny_dda_config();
        let artifacts = execute(&config).unwrap();
        let dir = unique_temp_dir("artifacts");
        let files = write_artifacts(&config, &artifacts, &dir).unwrap();
        // config echo + 3 traces + aggregate + summary
        assert_eq!(files.len(), 6);

        let echo = ExperimentConfig::from_path(&dir.join("config.json")).unwrap();
        assert_eq!(echo, config);

        let summary: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap())
                .unwrap();
        assert_eq!(summary["algorithm"], "dda");
        assert_eq!(summary["agents"], 3);
        assert_eq!(summary["config"]["name"], "tiny-dda");
        assert!(summary["wall_time_seconds"].as_f64().unwrap() >= 0.0);
        assert_eq!(summary["runs"].as_array().unwrap().len(), 3);

        // The aggregate CSV is recomputable from the per-seed trace CSVs,
        // bit for bit.
        let traces: Vec<DdaTrace> = config
            .seeds
            .iter()
            .map(|o| DdaTrace::from_csv_path(dir.join(format!("trace_{o}.csv"))).unwrap())
            .collect();
        let (header, cols) = crate::ratefit::read_csv_columns(&dir.join("aggregate.csv")).unwrap();
        let cost_mean_idx = header.iter().position(|h| h == "cost_mean").unwrap();
        let cost_std_idx = header.iter().position(|h| h == "cost_std").unwrap();
        for i in 0..traces[0].len() {
            let vals: Vec<f64> = traces.iter().map(|tr| tr.rows[i].cost).collect();
            let mean = vals.iter().sum::<f64>() / 3.0;
            let ss: f64 = vals.iter().map(|v| (v - mean) * (v - mean)).sum();
            assert_eq!(cols[cost_mean_idx][i], mean);
            assert_eq!(cols[cost_std_idx][i], (ss / 2.0).sqrt());
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn baseline_runs_share_the_start_point() {
        let mut config = tiny_dda_config();
        config.name = "tiny-dpga".into();
        config.algorithm.kind = AlgorithmKind::Dpga;
        config.algorithm.a = None;
        config.algorithm.f_lower = None;
        config.algorithm.eta = Some(1e-3);
        let artifacts = execute(&config).unwrap();
        assert_eq!(artifacts.aggregate.columns, &DpgaTrace::HEADER[1..]);
        // Round zero is the projected start for every seed: zero scatter.
        assert_eq!(artifacts.aggregate.std("cost").unwrap()[0], 0.0);
        assert_eq!(artifacts.summary["algorithm"], "dpga");
        assert!(artifacts.summary["cost"]["cost_total_final"].is_number());
    }
}
