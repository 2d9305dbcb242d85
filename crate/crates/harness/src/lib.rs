//! Experiment runner for link-prediction benchmarks over graph corpora.
//!
//! A run splits every corpus graph, trains or scores every configured
//! predictor at every embedding dimension, writes a flat `records.csv`, and
//! aggregates it into GFS tables and per-panel plot series.

pub mod config;
pub mod error;
pub mod manifest;
pub mod report;
pub mod runner;
pub mod seeds;

pub use config::{ExperimentConfig, MethodId};
pub use error::{HarnessError, Result};
pub use runner::{run_experiment, RunOutput, RunRecord, TaskFailure};
