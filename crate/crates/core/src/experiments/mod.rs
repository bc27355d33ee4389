//! Experiment configuration, the refinement-schedule runner, and report
//! emission.

mod config;
mod report;
mod run;

pub use config::{
    default_relay_schedule, default_schedule, EvalConfig, ExperimentConfig, ModelConfig,
    OutputConfig, ProblemConfig, ScheduleConfig, SolverConfig,
};
pub use report::{emit_report, load_reports, render, ReportFormat};
pub use run::{run_schedule, StepReport};
