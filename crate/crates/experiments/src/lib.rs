//! Sweep runners that regenerate the study's figure data as plot-ready CSV
//! tables with manifest echoes. Each run writes
//! `<outputs>/<name>/table.csv` and `<outputs>/<name>/manifest.json`; the
//! table bytes regenerate bit-identically from the spec and seed.

pub mod error;
pub mod runners;
pub mod spec;
pub mod table;

pub use error::ExpError;
pub use runners::run;
pub use spec::{ExperimentSpec, Sweep, REGISTRY};
pub use table::{Column, ResultTable};

pub type Result<T> = std::result::Result<T, ExpError>;
