//! Experiment plumbing: instances, suites, reports and their schema.

mod instance;
mod schema;
mod suite;

pub use instance::{generate_instance, Entry, Instance, InstanceSpec};
pub use schema::{validate, validate_report, REPORT_SCHEMA};
pub use suite::{
    aggregate, percentile, run_instance, run_suite, suite_instances, Aggregate, Environment, ExperimentConfig, Report,
    RunRecord, CSV_COLUMNS,
};
