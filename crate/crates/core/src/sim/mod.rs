//! Scripted gaze trajectories, trial and experiment runners.

mod experiment;
mod trajectory;
mod trial;

pub use experiment::{
    build_graph, run_experiment, summarize, trial_seed, write_results_csv, write_summary_csv, CellSummary,
    ExperimentPlan, ExperimentResults, GraphKind, PathSettings, SmallWorldParams, TrialFailure, TrialResult,
    RESULTS_HEADER,
};
pub use trajectory::{
    gen_trajectory, route, walk, Jitter, Route, TrajectoryFile, TrajectoryProfile, TrajectorySample, Walker, Waypoint,
    TRAJECTORY_FORMAT_VERSION,
};
pub use trial::{run_trial, run_trial_observed, TrialConfig, TrialMetrics, TrialSettings, TrialStep};

use crate::engine::EngineError;
use crate::graph::GraphError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid trajectory profile: {0}")]
    InvalidProfile(String),
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported trajectory format version {0}")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
