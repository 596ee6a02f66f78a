//! Experiment configuration: JSON schema, cross-field validation, seed
//! derivation, and output-directory resolution.
//!
//! A config is a single JSON object that fixes everything about a run:
//! the problem instance, the feasible set, the network model, the
//! algorithm and its knobs, and the list of per-run seed offsets. Parsing
//! is strict (unknown keys are rejected at every level) and
//! `parse(emit(config))` reproduces the config exactly.
//!
//! Randomness is funneled through two named seeds plus the offsets: the
//! problem seed (inside `problem`) fixes the instance data, the network
//! seed (inside `network`) anchors the mixing streams, and each entry of
//! `seeds` derives an independent mixing stream for one run via
//! [`derive_stream_seed`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dualavg_core::network::{NetworkConfig, DEFAULT_BETA_SAMPLES};
use dualavg_core::objective::InstanceSpec;
use dualavg_core::FeasibleSet64;
use ndarray::Array1;

use crate::error::{CliError, Result};

/// Environment variable naming a base directory for run artifacts; the
/// run's `name` is appended. An explicit `--output-dir` flag wins over it.
pub const OUT_DIR_ENV: &str = "DUALAVG_OUT_DIR";

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Run name; becomes the default output directory component, so it is
    /// restricted to `[A-Za-z0-9_-]`.
    pub name: String,
    /// Problem instance (family, sizes, problem seed, optional embedded
    /// data).
    pub problem: InstanceSpec,
    /// Feasible set the iterates are projected onto.
    pub set: SetConfig,
    /// Network model; required for distributed algorithms, forbidden for
    /// the centralized one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkConfig>,
    /// Algorithm selection and knobs.
    pub algorithm: AlgorithmConfig,
    /// Per-run seed offsets; one run (and one trace file) per entry.
    pub seeds: Vec<u64>,
    /// Default output directory; `--output-dir` and [`OUT_DIR_ENV`]
    /// override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Feasible-set description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetConfig {
    /// Euclidean ball; `center` defaults to the origin.
    Ball {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// Axis-aligned box with the same bounds in every coordinate.
    Box { lower: f64, upper: f64 },
    /// No constraint (centralized runs only).
    WholeSpace,
}

impl SetConfig {
    /// Instantiates the set in `dim` dimensions.
    pub fn build(&self, dim: usize) -> Result<FeasibleSet64> {
        let cfg = |e: dualavg_core::Error| CliError::Config(format!("set: {e}"));
        match self {
            Self::Ball { radius, center } => {
                let c = match center {
                    Some(v) => {
                        if v.len() != dim {
                            return Err(CliError::Config(format!(
                                "set: ball center has {} entries, problem dimension is {dim}",
                                v.len()
                            )));
                        }
                        Array1::from_vec(v.clone())
                    }
                    None => Array1::zeros(dim),
                };
                FeasibleSet64::ball(c, *radius).map_err(cfg)
            }
            Self::Box { lower, upper } => FeasibleSet64::box_bounds(
                Array1::from_elem(dim, *lower),
                Array1::from_elem(dim, *upper),
            )
            .map_err(cfg),
            Self::WholeSpace => FeasibleSet64::whole_space(dim).map_err(cfg),
        }
    }
}

/// Which optimization engine a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    /// Centralized dual averaging.
    Cda,
    /// Distributed dual averaging with gradient tracking.
    Dda,
    /// Distributed projected-gradient baseline.
    Dpga,
}

impl AlgorithmKind {
    /// Lowercase name as it appears in configs and summaries.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Cda => "cda",
            Self::Dda => "dda",
            Self::Dpga => "dpga",
        }
    }
}

/// A numeric value or a named resolution rule ( `"certified"` for step
/// sizes, `"auto"` for objective lower bounds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberOrKeyword {
    Number(f64),
    Keyword(String),
}

/// Algorithm selection plus every knob the engines expose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    /// Dual-averaging step scale: a positive number or `"certified"` to
    /// derive the largest certifiable value (`1/L` for the centralized
    /// engine). Forbidden for the baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<NumberOrKeyword>,
    /// Baseline gradient step; required for `dpga`, forbidden otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Communication (or iteration) rounds per run.
    pub rounds: usize,
    /// Record per-round invariant violations.
    #[serde(default = "default_true")]
    pub monitors: bool,
    /// Centralized engine only: stop once the mapping norm stays at
    /// numerical zero for a window of rounds.
    #[serde(default)]
    pub early_stop: bool,
    /// Objective lower bound over the set: a number, or `"auto"` for the
    /// closed-form bound (compact sets only). Enables the decay-bound
    /// trace column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_lower: Option<NumberOrKeyword>,
    /// Proximal center for dual-averaging runs and common start point for
    /// baseline runs; defaults to the origin. Both engines start at its
    /// projection onto the set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    /// Monte Carlo samples for the network contraction estimate.
    #[serde(default = "default_beta_samples")]
    pub beta_samples: usize,
}

fn default_true() -> bool {
    true
}

fn default_beta_samples() -> usize {
    DEFAULT_BETA_SAMPLES
}

impl ExperimentConfig {
    /// Parses a config from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config parse: {e}")))
    }

    /// Parses a config from a JSON file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    /// Emits the config as pretty JSON; `from_json` inverts this exactly.
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Number of summands/agents in the problem instance.
    pub fn problem_n(&self) -> usize {
        match &self.problem {
            InstanceSpec::Pca { n, .. } | InstanceSpec::Quadratic { n, .. } => *n,
        }
    }

    /// Problem dimension.
    pub fn problem_dim(&self) -> usize {
        match &self.problem {
            InstanceSpec::Pca { dim, .. } | InstanceSpec::Quadratic { dim, .. } => *dim,
        }
    }

    /// Cross-field consistency checks beyond what serde enforces.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(CliError::Config(m));
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return cfg(format!(
                "name {:?} must be nonempty and use only letters, digits, '-', '_'",
                self.name
            ));
        }
        if self.seeds.is_empty() {
            return cfg("seeds must list at least one run offset".into());
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return cfg("seeds contains duplicate offsets".into());
        }
        if self.algorithm.rounds == 0 {
            return cfg("rounds must be at least 1".into());
        }
        if self.algorithm.beta_samples < 2 {
            return cfg("beta_samples must be at least 2".into());
        }
        let dim = self.problem_dim();
        if let Some(c) = &self.algorithm.center {
            if c.len() != dim {
                return cfg(format!(
                    "algorithm.center has {} entries, problem dimension is {dim}",
                    c.len()
                ));
            }
        }
        if let SetConfig::Ball {
            center: Some(c), ..
        } = &self.set
        {
            if c.len() != dim {
                return cfg(format!(
                    "set.center has {} entries, problem dimension is {dim}",
                    c.len()
                ));
            }
        }
        match &self.algorithm.a {
            Some(NumberOrKeyword::Number(v)) if !(v.is_finite() && *v > 0.0) => {
                return cfg(format!("step a must be positive and finite, got {v}"));
            }
            Some(NumberOrKeyword::Keyword(k)) if k != "certified" => {
                return cfg(format!("step a accepts a number or \"certified\", got {k:?}"));
            }
            _ => {}
        }
        match &self.algorithm.f_lower {
            Some(NumberOrKeyword::Number(v)) if !v.is_finite() => {
                return cfg(format!("f_lower must be finite, got {v}"));
            }
            Some(NumberOrKeyword::Keyword(k)) if k != "auto" => {
                return cfg(format!("f_lower accepts a number or \"auto\", got {k:?}"));
            }
            _ => {}
        }
        let kind = self.algorithm.kind;
        let distributed = kind != AlgorithmKind::Cda;
        if distributed {
            match &self.network {
                None => return cfg(format!("{} requires a network section", kind.name())),
                Some(net) if net.n() != self.problem_n() => {
                    return cfg(format!(
                        "network has {} agents, problem has {} summands",
                        net.n(),
                        self.problem_n()
                    ));
                }
                Some(_) => {}
            }
            if matches!(self.set, SetConfig::WholeSpace) {
                return cfg("distributed runs require a compact set (ball or box)".into());
            }
        } else if self.network.is_some() {
            return cfg("cda is centralized; remove the network section".into());
        }
        match kind {
            AlgorithmKind::Cda | AlgorithmKind::Dda => {
                if self.algorithm.a.is_none() {
                    return cfg(format!("{} requires a step a", kind.name()));
                }
                if self.algorithm.eta.is_some() {
                    return cfg(format!("{} uses a, not eta", kind.name()));
                }
            }
            AlgorithmKind::Dpga => {
                match self.algorithm.eta {
                    None => return cfg("dpga requires a step eta".into()),
                    Some(v) if !(v.is_finite() && v >= 0.0) => {
                        return cfg(format!("eta must be finite and nonnegative, got {v}"));
                    }
                    Some(_) => {}
                }
                if self.algorithm.a.is_some() {
                    return cfg("dpga uses eta, not a".into());
                }
                if self.algorithm.f_lower.is_some() {
                    return cfg("f_lower does not apply to dpga".into());
                }
                if self.algorithm.early_stop {
                    return cfg("early_stop does not apply to dpga".into());
                }
            }
        }
        Ok(())
    }

    /// Where artifacts go: `--output-dir` flag, then [`OUT_DIR_ENV`] (with
    /// the run name appended), then the config's `output_dir`, then
    /// `runs/<name>`.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Ok(base) = std::env::var(OUT_DIR_ENV) {
            if !base.is_empty() {
                return PathBuf::from(base).join(&self.name);
            }
        }
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(&self.name))
    }
}

/// SplitMix64 finalizer; spreads nearby integers across the u64 range.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixing-stream seed for one run: a deterministic mix of the network seed
/// and the run's offset, so nearby offsets give unrelated streams.
pub fn derive_stream_seed(network_seed: u64, offset: u64) -> u64 {
    splitmix64(network_seed.wrapping_add(splitmix64(offset)))
}
