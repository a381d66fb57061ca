//! Experiment specifications: a base simulation config plus a sweep and
//! per-study options.

use serde::{Deserialize, Serialize};

use attnspec_sim::classify::Strategy;
use attnspec_sim::SimConfig;

use crate::error::ExpError;
use crate::Result;

/// The fixed registry of runnable studies.
pub const REGISTRY: &[&str] = &[
    "bulk",
    "align",
    "thresholds",
    "snr",
    "phase_diagram",
    "classify",
    "attn_concentration",
];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Which knob the grid drives; each runner documents its parameter.
    pub parameter: String,
    pub grid: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// One of [`REGISTRY`].
    pub name: String,
    pub base: SimConfig,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    /// Skip all Monte Carlo columns.
    #[serde(default)]
    pub theory_only: bool,
    /// Monte Carlo repetitions; each runner has its own default.
    #[serde(default)]
    pub trials: Option<usize>,
    /// Second axis for the phase diagram.
    #[serde(default)]
    pub delta_grid: Option<Vec<f64>>,
    /// Score temperature for the attention study.
    #[serde(default)]
    pub tau: Option<f64>,
    /// Vocabulary per dimension for the attention study.
    #[serde(default)]
    pub vocab_factor: Option<usize>,
    /// Sequences per dimension point for the attention study.
    #[serde(default)]
    pub sequences: Option<usize>,
    /// Ridge penalty for classification.
    #[serde(default)]
    pub lambda_ridge: Option<f64>,
    /// Train fraction for classification.
    #[serde(default)]
    pub split: Option<f64>,
    /// Pooling strategies for alignment / classification panels.
    #[serde(default)]
    pub strategies: Option<Vec<Strategy>>,
    /// Optimizer budget for the learned strategy.
    #[serde(default)]
    pub learn_restarts: Option<usize>,
    #[serde(default)]
    pub learn_iters: Option<usize>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if !REGISTRY.contains(&self.name.as_str()) {
            return Err(ExpError::Config(format!(
                "unknown experiment {:?}; expected one of {:?}",
                self.name, REGISTRY
            )));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.grid.is_empty() {
                return Err(ExpError::Config("sweep grid must be nonempty".into()));
            }
            if sweep.grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ExpError::Config("sweep grid must be ascending".into()));
            }
        }
        self.base.validate()?;
        Ok(())
    }

    /// Sweep grid with a per-runner default.
    pub fn grid_or(&self, default: Vec<f64>) -> Vec<f64> {
        self.sweep
            .as_ref()
            .map(|s| s.grid.clone())
            .unwrap_or(default)
    }
}

/// 41 uniform signal strengths on [0, 5].
pub fn default_mu_grid() -> Vec<f64> {
    (0..41).map(|i| 5.0 * i as f64 / 40.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use attnspec_sim::{CorrSpec, WeightSpec};

    fn base() -> SimConfig {
        SimConfig {
            d: 20,
            vocab: 40,
            samples: 30,
            t: 4,
            mu_norm: 1.0,
            r: CorrSpec::Prefix { len: 2 },
            weights: WeightSpec::Mean,
            noise: Default::default(),
            xi_mode: Default::default(),
            center_classes: true,
            seed: 1,
            trials: 1,
        }
    }

    #[test]
    fn registry_and_grid_validation() {
        let mut spec = ExperimentSpec {
            name: "bulk".into(),
            base: base(),
            sweep: None,
            theory_only: false,
            trials: None,
            delta_grid: None,
            tau: None,
            vocab_factor: None,
            sequences: None,
            lambda_ridge: None,
            split: None,
            strategies: None,
            learn_restarts: None,
            learn_iters: None,
        };
        spec.validate().unwrap();
        spec.name = "nonsense".into();
        assert!(spec.validate().is_err());
        spec.name = "align".into();
        spec.sweep = Some(Sweep {
            parameter: "mu_norm".into(),
            grid: vec![1.0, 0.5],
        });
        assert!(spec.validate().is_err());
    }
}
