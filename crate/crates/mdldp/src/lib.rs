//! Experiment harness for multidimensional LDP attacks: dataset IO, synthetic
//! data, configuration, a parallel grid runner and result export.

pub mod config;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod export;
pub mod synth;

pub use config::{Experiment, ExperimentKind, Format, Overrides};
pub use dataset::{load_dataset, Schema};
pub use error::{HarnessError, Result};
pub use experiment::run_experiment;
pub use export::{export_results, ResultRow};
