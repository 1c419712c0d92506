//! Experiment harness: configuration, pipelines, the ablation pack and the
//! dense-operator oracle.

mod config;
mod io;
mod run;

pub use config::{
    ConfigDoc, ExperimentConfig, ModeName, OutputSection, SceneSource, SharedInit, ShotsSection,
};
pub use io::{band_pgm, metrics_csv, MetricsRow, METRICS_HEADER};
pub use run::{
    build_plan, evaluate, exit_code, load_layer, load_scene, run_ablation, run_experiment, run_oracle, simulate,
    write_outcome, ExperimentOutcome, OracleOptions, OracleReport, ABLATION_CASES, ORACLE_TOLERANCE,
};
