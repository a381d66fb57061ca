//! Simulator error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    /// Invalid configuration or preconditions.
    #[error("config error: {0}")]
    Config(String),

    /// Numerical failure inside a solver.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Propagated theory-side error.
    #[error(transparent)]
    Core(#[from] attnspec_core::CoreError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
