//! Simulation configuration: a serde-friendly mirror of the core model types
//! plus sampling options. Unknown keys in config files are rejected.

use attnspec_core::matrix::SymMatrix;
use attnspec_core::model::{CorrelationModel, PoolWeights};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::Result;

/// Correlation matrix specification.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum CorrSpec {
    /// Fully correlated block on the first `len` positions.
    Prefix { len: usize },
    /// `I + theta u u^T` with `u` uniform on the first `support` positions.
    SpikedUniform { theta: f64, support: usize },
    /// `I + theta u u^T` with an explicit unit vector.
    Spiked { theta: f64, u: Vec<f64> },
    /// Explicit symmetric PSD matrix, row-major rows.
    Custom { rows: Vec<Vec<f64>> },
}

impl CorrSpec {
    pub fn build(&self, t: usize) -> Result<CorrelationModel<f64>> {
        let model = match self {
            CorrSpec::Prefix { len } => CorrelationModel::prefix(*len, t)?,
            CorrSpec::SpikedUniform { theta, support } => {
                CorrelationModel::spiked_uniform(*theta, *support, t)?
            }
            CorrSpec::Spiked { theta, u } => {
                if u.len() != t {
                    return Err(SimError::Config(format!(
                        "spike direction length {} does not match T = {t}",
                        u.len()
                    )));
                }
                CorrelationModel::spiked(*theta, u.clone())?
            }
            CorrSpec::Custom { rows } => {
                if rows.len() != t || rows.iter().any(|r| r.len() != t) {
                    return Err(SimError::Config(format!(
                        "custom correlation matrix must be {t} x {t}"
                    )));
                }
                let data: Vec<f64> = rows.iter().flatten().copied().collect();
                CorrelationModel::custom(SymMatrix::from_row_major(t, data)?)?
            }
        };
        Ok(model)
    }

    /// Prefix block length used for classification labels: the correlated
    /// prefix for the prefix model, the spike support for spiked models, the
    /// full sequence otherwise.
    pub fn label_len(&self, t: usize) -> usize {
        match self {
            CorrSpec::Prefix { len } => *len,
            CorrSpec::SpikedUniform { support, .. } => *support,
            _ => t,
        }
    }
}

/// Pooling weights specification.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum WeightSpec {
    Mean,
    Causal,
    /// Normalized top eigenvector of the configured correlation matrix.
    Optimal,
    Custom {
        w: Vec<f64>,
    },
    /// Realized per-sequence softmax attention with `tau/d` score scaling;
    /// only the attention study consumes this variant.
    EmpiricalCausal {
        tau: f64,
    },
}

impl WeightSpec {
    /// Deterministic weight vector; errors on the empirical variant, which
    /// has no sequence-independent value.
    pub fn build(&self, r: &CorrelationModel<f64>) -> Result<PoolWeights<f64>> {
        let t = r.t();
        Ok(match self {
            WeightSpec::Mean => PoolWeights::mean(t),
            WeightSpec::Causal => PoolWeights::causal(t),
            WeightSpec::Optimal => PoolWeights::optimal(r)?,
            WeightSpec::Custom { w } => PoolWeights::custom(w.clone())?,
            WeightSpec::EmpiricalCausal { .. } => {
                return Err(SimError::Config(
                    "empirical causal attention weights are realized per sequence; \
                     use the attention study, not a fixed-weight simulation"
                        .into(),
                ))
            }
        })
    }
}

/// Embedding-noise distribution. Both are centered with unit variance; the
/// sign table has bounded higher moments, which is all the limit theory uses.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    Gaussian,
    Rademacher,
}

/// How the positional signs are drawn.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum XiMode {
    /// `+/-1` signs with second moments exactly `R`; requires `R` to have
    /// unit diagonal and entries in `[-1, 1]`.
    #[default]
    Binary,
    /// Real `xi ~ N(0, R)` factors with tokens drawn over the whole
    /// vocabulary; covers correlation models no sign vector can realize.
    GaussianFactor,
}

fn default_trials() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// Full description of a finite-dimensional simulation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub d: usize,
    pub vocab: usize,
    pub samples: usize,
    pub t: usize,
    pub mu_norm: f64,
    pub r: CorrSpec,
    pub weights: WeightSpec,
    #[serde(default)]
    pub noise: NoiseKind,
    #[serde(default)]
    pub xi_mode: XiMode,
    /// Remove the empirical class means of the embedding noise. The limiting
    /// formulas describe the model with vanishing class means; at finite `V`
    /// the raw table carries an extra spike of squared norm ~ `4 d / V` that
    /// visibly shifts outliers (see the simulator tests), so this defaults on.
    #[serde(default = "default_true")]
    pub center_classes: bool,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.vocab == 0 || self.samples == 0 || self.t == 0 {
            return Err(SimError::Config(
                "dimensions d, vocab, samples, t must be positive".into(),
            ));
        }
        if self.vocab % 2 != 0 {
            return Err(SimError::Config(format!(
                "vocab must be even for balanced signs, got {}",
                self.vocab
            )));
        }
        if self.trials == 0 {
            return Err(SimError::Config("trials must be >= 1".into()));
        }
        if self.mu_norm < 0.0 {
            return Err(SimError::Config("mu_norm must be nonnegative".into()));
        }
        let r = self.r.build(self.t)?;
        if self.xi_mode == XiMode::Binary && !r.binary_realizable() {
            return Err(SimError::Config(
                "correlation matrix is not realizable by +/-1 signs (diagonal must be 1 and \
                 entries within [-1, 1]); set xi_mode = \"gaussian_factor\""
                    .into(),
            ));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.d as f64 / self.vocab as f64
    }

    pub fn gamma(&self) -> f64 {
        self.d as f64 / self.samples as f64
    }
}
