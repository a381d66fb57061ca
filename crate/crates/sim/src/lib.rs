//! Monte Carlo side of the toolkit: generates the pooled sequence model at
//! finite dimensions, measures spectra and alignments, realizes softmax
//! attention pooling, and runs the downstream ridge classification.
//!
//! Reproducibility contract: every random quantity is drawn from a substream
//! addressed by `(seed, trial, stage)`, so identical configurations reproduce
//! bit-identically regardless of trial scheduling or thread count.

pub mod attention;
pub mod classify;
pub mod config;
pub mod dataset;
pub mod dump;
pub mod error;
pub mod rng;
pub mod spectrum;

pub use config::{CorrSpec, NoiseKind, SimConfig, WeightSpec, XiMode};
pub use dataset::{generate, Dataset};
pub use error::SimError;
pub use spectrum::{empirical_spectrum, EmpiricalSpectrum};

pub type Result<T> = std::result::Result<T, SimError>;

/// Eigenvalues beyond `lambda_plus (1 + 5 d^{-2/3})` count as empirical
/// outliers; the buffer matches the scale of edge fluctuations.
pub fn outlier_threshold(lambda_plus: f64, d: usize) -> f64 {
    lambda_plus * (1.0 + 5.0 * (d as f64).powf(-2.0 / 3.0))
}
