//! Error type shared by the theory modules.

use thiserror::Error;

/// Failures are split into invalid caller input (bad dimensions, matrices
/// failing validation, out-of-domain arguments) and internal-consistency
/// violations (branch-selection ambiguity, defining equations not satisfied),
/// which indicate parameter corruption rather than user error.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Caller-supplied data violates a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The Rayleigh-quotient supremum is not attained: the all-ones vector is
    /// orthogonal to the top eigenspace. Carries the supremum `lambda_max`.
    #[error("no attainable maximizer: ones vector orthogonal to the top eigenspace (supremum = lambda_max = {lambda_max})")]
    Unattainable { lambda_max: f64 },

    /// The root tracker could not single out the analytic branch.
    #[error(
        "branch selection ambiguous at z = {z_re} + {z_im}i; candidate roots (re, im): {roots:?}"
    )]
    BranchAmbiguous {
        z_re: f64,
        z_im: f64,
        roots: Vec<(f64, f64)>,
    },

    /// An internal identity failed to hold within tolerance.
    #[error("internal consistency: {0}")]
    Internal(String),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::Invalid(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CoreError::Internal(msg.into())
    }
}
