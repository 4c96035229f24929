//! Experiment tooling around the boosting library: dataset loading,
//! configuration, training orchestration, metric evaluation and curve
//! emission.

pub mod config;
pub mod dataset;
pub mod experiment;
pub mod metrics;
