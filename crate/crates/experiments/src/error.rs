//! Experiment-runner errors.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("config error: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Sim(#[from] attnspec_sim::SimError),

    #[error(transparent)]
    Core(#[from] attnspec_core::CoreError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
