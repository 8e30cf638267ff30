//! Monte-Carlo engine for the simulation designs: data generation, rejection
//! and selection experiments, and the single-run timing comparison.

mod distribution;
mod experiment;
mod scenario;

pub use distribution::Distribution;
pub use experiment::{
    run_rejection_experiment, run_selection_experiment, run_timing, ExperimentKind, ExperimentReport, ExperimentRow,
    ExperimentSettings, Method, TimedRun, TimingReport,
};
pub use scenario::{generate_sample, Preset, ScenarioSpec};
