//! Experiment runner for data collaboration analysis.
//!
//! A dataset (CSV or the built-in Gaussian-blob generator) is split across
//! simulated institutions. Each institution holds out part of its rows,
//! fits PCA on the rest, and shares only reduced rows and the reduced
//! anchor. The runner compares individual, centralized, and collaborative
//! accuracy under repeated holdout, times collaborative-function
//! estimation, and writes plot-ready CSV or JSON-lines tables.
//!
//! Raw rows are private to [`institution::LocalInstitution`]; collaborative
//! methods only ever receive [`institution::SharedRepresentation`] values.

pub mod config;
pub mod data;
mod error;
pub mod experiment;
pub mod institution;
pub mod model;
pub mod results;
mod seed;

pub use config::{ClassifierKind, DimRuleMode, ExperimentConfig, Method};
pub use data::{load_csv, make_synthetic, partition, read_csv, write_csv, Dataset, SyntheticSpec};
pub use error::{HarnessError, Result};
pub use experiment::{load_dataset, run_accuracy_experiment, run_accuracy_on, run_timing_experiment, run_timing_on};
pub use results::{
    emit_results, parse_results, render_results, Aggregate, ExperimentResult, Format, RunRecord, Status,
    SCHEMA_VERSION,
};
pub use seed::derive_seed;
