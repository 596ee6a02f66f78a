//! Built-in experiment presets.
//!
//! Two scales are provided: desk-scale runs that finish in seconds on a
//! laptop, and one full-scale run (gated behind `--allow-large`) matching
//! the sizes used in wider benchmarking. The desk presets share one
//! problem instance and one network so the distributed dual-averaging run
//! and the projected-gradient baseline are directly comparable: same data,
//! same network realizations per seed offset, same start point.
//!
//! Dual-averaging runs start at the projection of the proximal center. A
//! centered start would sit exactly at a stationary point of the
//! data-block objective (its gradient vanishes at the origin), so the
//! presets place the center at norm 1/2 inside the unit ball, away from
//! the stationary set.

use dualavg_core::network::{NetworkConfig, DEFAULT_BETA_SAMPLES};
use dualavg_core::objective::InstanceSpec;

use crate::config::{
    AlgorithmConfig, AlgorithmKind, ExperimentConfig, NumberOrKeyword, SetConfig,
};
use crate::error::{CliError, Result};

/// One row of `dualavg presets`.
#[derive(Debug, Clone, Copy)]
pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// Needs `--allow-large` to run.
    pub large: bool,
}

/// All built-in presets.
pub fn list() -> &'static [PresetInfo] {
    &[
        PresetInfo {
            name: "pca-desk",
            summary: "distributed dual averaging, 10 agents with 10x50 data blocks on the \
                      unit ball, sparse random network (p = 0.1), certified step, \
                      10 seeds x 2000 rounds",
            large: false,
        },
        PresetInfo {
            name: "pca-desk-dpga",
            summary: "projected-gradient baseline (eta = 1e-4) on the pca-desk instance, \
                      same network seeds and start point",
            large: false,
        },
        PresetInfo {
            name: "cda-quadratic",
            summary: "centralized dual averaging on a convex quadratic (5 summands, \
                      dim 20, ball radius 2) with the decay-bound column enabled",
            large: false,
        },
        PresetInfo {
            name: "pca-paper",
            summary: "full-scale distributed run: 50 agents with 30x500 data blocks, \
                      p = 0.1, step 1.0, 10 seeds x 2000 rounds (minutes of CPU)",
            large: true,
        },
    ]
}

/// Looks up a preset's metadata.
pub fn info(name: &str) -> Result<PresetInfo> {
    list()
        .iter()
        .find(|p| p.name == name)
        .copied()
        .ok_or_else(|| {
            let known: Vec<&str> = list().iter().map(|p| p.name).collect();
            CliError::Config(format!(
                "unknown preset {name:?}; available: {}",
                known.join(", ")
            ))
        })
}

/// A point of norm `norm` with equal coordinates.
fn uniform_center(dim: usize, norm: f64) -> Vec<f64> {
    vec![norm / (dim as f64).sqrt(); dim]
}

fn desk_problem() -> InstanceSpec {
    InstanceSpec::Pca {
        n: 10,
        rows: 10,
        dim: 50,
        seed: 42,
        entries: None,
    }
}

fn desk_network() -> NetworkConfig {
    NetworkConfig::Bernoulli {
        n: 10,
        p: 0.1,
        tau: None,
        seed: 7,
    }
}

/// Builds the named preset's full config.
pub fn build(name: &str) -> Result<ExperimentConfig> {
    info(name)?;
    let config = match name {
        "pca-desk" => ExperimentConfig {
            name: "pca-desk".into(),
            problem: desk_problem(),
            set: SetConfig::Ball {
                radius: 1.0,
                center: None,
            },
            network: Some(desk_network()),
            algorithm: AlgorithmConfig {
                kind: AlgorithmKind::Dda,
                a: Some(NumberOrKeyword::Keyword("certified".into())),
                eta: None,
                rounds: 2000,
                monitors: true,
                early_stop: false,
                f_lower: Some(NumberOrKeyword::Keyword("auto".into())),
                center: Some(uniform_center(50, 0.5)),
                beta_samples: DEFAULT_BETA_SAMPLES,
            },
            seeds: (0..10).collect(),
            output_dir: None,
        },
        "pca-desk-dpga" => ExperimentConfig {
            name: "pca-desk-dpga".into(),
            problem: desk_problem(),
            set: SetConfig::Ball {
                radius: 1.0,
                center: None,
            },
            network: Some(desk_network()),
            algorithm: AlgorithmConfig {
                kind: AlgorithmKind::Dpga,
                a: None,
                eta: Some(1e-4),
                rounds: 2000,
                monitors: true,
                early_stop: false,
                f_lower: None,
                center: Some(uniform_center(50, 0.5)),
                beta_samples: DEFAULT_BETA_SAMPLES,
            },
            seeds: (0..10).collect(),
            output_dir: None,
        },
        "cda-quadratic" => ExperimentConfig {
            name: "cda-quadratic".into(),
            problem: InstanceSpec::Quadratic {
                n: 5,
                dim: 20,
                seed: 5,
                convex: true,
                entries: None,
            },
            set: SetConfig::Ball {
                radius: 2.0,
                center: None,
            },
            network: None,
            algorithm: AlgorithmConfig {
                kind: AlgorithmKind::Cda,
                a: Some(NumberOrKeyword::Keyword("certified".into())),
                eta: None,
                rounds: 5000,
                monitors: true,
                early_stop: false,
                f_lower: Some(NumberOrKeyword::Keyword("auto".into())),
                center: None,
                beta_samples: DEFAULT_BETA_SAMPLES,
            },
            seeds: vec![0],
            output_dir: None,
        },
        "pca-paper" => ExperimentConfig {
            name: "pca-paper".into(),
            problem: InstanceSpec::Pca {
                n: 50,
                rows: 30,
                dim: 500,
                seed: 42,
                entries: None,
            },
            set: SetConfig::Ball {
                radius: 1.0,
                center: None,
            },
            network: Some(NetworkConfig::Bernoulli {
                n: 50,
                p: 0.1,
                tau: None,
                seed: 7,
            }),
            algorithm: AlgorithmConfig {
                kind: AlgorithmKind::Dda,
                a: Some(NumberOrKeyword::Number(1.0)),
                eta: None,
                rounds: 2000,
                monitors: true,
                early_stop: false,
                f_lower: Some(NumberOrKeyword::Keyword("auto".into())),
                center: Some(uniform_center(500, 0.5)),
                beta_samples: DEFAULT_BETA_SAMPLES,
            },
            seeds: (0..10).collect(),
            output_dir: None,
        },
        _ => unreachable!("info() vetted the name"),
    };
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds_and_validates() {
        for p in list() {
            let config = build(p.name).unwrap();
            config.validate().unwrap();
            assert_eq!(config.name, p.name);
            // Emitted presets must parse back unchanged.
            let back = ExperimentConfig::from_json(&config.to_json_pretty()).unwrap();
            assert_eq!(back, config);
        }
    }

    #[test]
    fn unknown_presets_are_config_errors() {
        let err = build("does-not-exist").unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("pca-desk"));
    }

    #[test]
    fn only_the_full_scale_preset_is_gated() {
        let large: Vec<&str> = list().iter().filter(|p| p.large).map(|p| p.name).collect();
        assert_eq!(large, ["pca-paper"]);
    }

    #[test]
    fn desk_presets_share_instance_network_and_start() {
        let dda = build("pca-desk").unwrap();
        let dpga = build("pca-desk-dpga").unwrap();
        assert_eq!(dda.problem, dpga.problem);
        assert_eq!(dda.network, dpga.network);
        assert_eq!(dda.algorithm.center, dpga.algorithm.center);
        assert_eq!(dda.seeds, dpga.seeds);
        let c = dda.algorithm.center.unwrap();
        let norm: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 0.5).abs() <= 1e-12, "start norm {norm}");
    }
}
