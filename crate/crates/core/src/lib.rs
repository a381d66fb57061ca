//! Exact spectral theory for attention-pooled sample covariance matrices.
//!
//! The model: a fixed two-class embedding table of dimension `d` over a
//! vocabulary of size `V`, sequences of `T` correlated token signs pooled with
//! a weight vector `w`, and the sample covariance `S = C C^T / N` of the `N`
//! pooled columns. In the proportional regime `d/V -> delta`, `d/N -> gamma`
//! the spectrum of `S` converges to a free multiplicative convolution of two
//! Marchenko-Pastur laws scaled by `kappa = ||w||^2`, and the hidden signal
//! direction undergoes two successive BBP-type transitions controlled by the
//! pooling scalars `alpha = w^T R w` and `kappa`.
//!
//! Three modules cover the theory side:
//! - [`model`]: problem data (dimensions, correlation matrices, pooling
//!   weights) and the scalar functionals derived from them,
//! - [`bulk`]: the limiting bulk law (Stieltjes transform, density, support
//!   edge),
//! - [`spike`]: outlier locations, eigenvector overlaps and detectability
//!   thresholds.
//!
//! All numerics are generic over the floating-point scalar via [`Scalar`];
//! the type aliases at the crate root fix `f64`, which is what the simulator
//! and the command-line tools use.

pub mod bulk;
pub mod error;
pub mod io;
pub mod matrix;
pub mod model;
pub mod scalar;
pub mod spike;

pub use error::CoreError;
pub use scalar::Scalar;

// `Complex` appears in the public Stieltjes API; callers get the same version.
pub use num_complex;

/// Crate-level result type.
pub type Result<T> = std::result::Result<T, CoreError>;

// Concrete `f64` aliases; the generic types live in their modules.
pub type ModelDims = model::ModelDims<f64>;
pub type CorrelationModel = model::CorrelationModel<f64>;
pub type PoolWeights = model::PoolWeights<f64>;
pub type PoolScalars = model::PoolScalars<f64>;
pub type SymMatrix = matrix::SymMatrix<f64>;
pub type BulkParams = bulk::BulkParams<f64>;
pub type BulkLaw = bulk::BulkLaw<f64>;
pub type StieltjesValue = bulk::StieltjesValue<f64>;
pub type EdgeInfo = bulk::EdgeInfo<f64>;
pub type EdgeStieltjes = bulk::EdgeStieltjes<f64>;
pub type SpikeReport = spike::SpikeReport<f64>;
