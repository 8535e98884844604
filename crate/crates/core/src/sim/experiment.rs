use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::Technique;
use crate::graph::{generate_small_world, load_metro, sample_task_path, Graph, PathKind, PathRequest, TaskPath};
use crate::task::TaskKind;

use super::trajectory::TrajectoryProfile;
use super::trial::{run_trial, TrialConfig, TrialMetrics};
use super::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GraphKind {
    #[serde(rename = "metro")]
    Metro,
    #[serde(rename = "small-world")]
    SmallWorld,
}

impl GraphKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GraphKind::Metro => "metro",
            GraphKind::SmallWorld => "small-world",
        }
    }
}

impl std::str::FromStr for GraphKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "metro" => Ok(GraphKind::Metro),
            "small-world" => Ok(GraphKind::SmallWorld),
            _ => Err(format!("unknown graph kind `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallWorldParams {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub seed: u64,
}

impl Default for SmallWorldParams {
    fn default() -> Self {
        SmallWorldParams { n: 180, k: 4, p: 0.1, seed: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSettings {
    pub length: usize,
    pub require_long_link: bool,
    pub avoid_crossings: bool,
}

impl Default for PathSettings {
    fn default() -> Self {
        PathSettings { length: 7, require_long_link: true, avoid_crossings: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentPlan {
    pub techniques: Vec<Technique>,
    pub graphs: Vec<GraphKind>,
    pub path_kinds: Vec<PathKind>,
    pub tasks: Vec<TaskKind>,
    pub trials: u32,
    pub master_seed: u64,
    /// Leave the elastic variants out of tracing cells.
    pub exclude_elastic_tracing: bool,
    pub small_world: SmallWorldParams,
    pub path: PathSettings,
    pub profile: TrajectoryProfile,
    pub config: TrialConfig,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            techniques: Technique::ALL.to_vec(),
            graphs: vec![GraphKind::Metro, GraphKind::SmallWorld],
            path_kinds: vec![PathKind::Weighted, PathKind::Homogeneous],
            tasks: vec![TaskKind::Selection, TaskKind::Tracing],
            trials: 6,
            master_seed: 0,
            exclude_elastic_tracing: true,
            small_world: SmallWorldParams::default(),
            path: PathSettings::default(),
            profile: TrajectoryProfile::default(),
            config: TrialConfig::default(),
        }
    }
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.profile.validate()?;
        self.config.technique.validate()?;
        let empty = self.techniques.is_empty() || self.graphs.is_empty() || self.path_kinds.is_empty() || self.tasks.is_empty();
        if empty || self.trials == 0 {
            return Err(SimError::InvalidPlan("every grid axis needs at least one entry".into()));
        }
        Ok(())
    }

    pub fn techniques_for(&self, task: TaskKind) -> Vec<Technique> {
        self.techniques
            .iter()
            .copied()
            .filter(|t| !(task == TaskKind::Tracing && self.exclude_elastic_tracing && t.is_elastic()))
            .collect()
    }
}

/// One simulated trial with its grid coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub technique: Technique,
    pub graph: GraphKind,
    pub path_kind: PathKind,
    pub task: TaskKind,
    pub trial: u32,
    pub seed: u64,
    pub time_s: f64,
    pub detaches: u32,
    pub attaches: u32,
    pub ring_jumps: u32,
    pub distance_m: f64,
    pub completed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub graph: GraphKind,
    pub path_kind: PathKind,
    pub task: TaskKind,
    pub trial: u32,
    pub technique: Option<Technique>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentResults {
    pub rows: Vec<TrialResult>,
    pub failures: Vec<TrialFailure>,
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed shared by every technique in the same graph, path kind, task and
/// trial slot, so technique comparisons are paired.
pub fn trial_seed(master: u64, graph: GraphKind, path_kind: PathKind, task: TaskKind, trial: u32) -> u64 {
    let parts = [graph as u64, path_kind as u64, task as u64, trial as u64];
    parts.iter().fold(splitmix64(master), |h, &p| splitmix64(h ^ p))
}

pub fn build_graph(kind: GraphKind, params: &SmallWorldParams) -> Result<Graph, SimError> {
    Ok(match kind {
        GraphKind::Metro => load_metro(),
        GraphKind::SmallWorld => generate_small_world(params.n, params.k, params.p, params.seed)?,
    })
}

struct Slot {
    graph: usize,
    path_kind: PathKind,
    task: TaskKind,
    trial: u32,
    seed: u64,
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResults, SimError> {
    plan.validate()?;
    let graphs: Vec<Graph> = plan.graphs.iter().map(|&k| build_graph(k, &plan.small_world)).collect::<Result<_, _>>()?;

    let mut slots = Vec::new();
    for (gi, &gk) in plan.graphs.iter().enumerate() {
        for &path_kind in &plan.path_kinds {
            for &task in &plan.tasks {
                for trial in 0..plan.trials {
                    let seed = trial_seed(plan.master_seed, gk, path_kind, task, trial);
                    slots.push(Slot { graph: gi, path_kind, task, trial, seed });
                }
            }
        }
    }

    let paths: Vec<Result<(TaskPath, Graph), String>> = slots
        .par_iter()
        .map(|s| {
            let req = PathRequest {
                length: plan.path.length,
                kind: s.path_kind,
                require_long_link: plan.path.require_long_link,
                avoid_crossings: plan.path.avoid_crossings,
                seed: s.seed,
            };
            sample_task_path(&graphs[s.graph], &req).map_err(|e| e.to_string())
        })
        .collect();

    let mut jobs = Vec::new();
    let mut failures = Vec::new();
    for (si, s) in slots.iter().enumerate() {
        match &paths[si] {
            Ok(_) => jobs.extend(plan.techniques_for(s.task).into_iter().map(|t| (si, t))),
            Err(message) => failures.push(TrialFailure {
                graph: plan.graphs[s.graph],
                path_kind: s.path_kind,
                task: s.task,
                trial: s.trial,
                technique: None,
                message: message.clone(),
            }),
        }
    }

    let outcomes: Vec<Result<TrialMetrics, String>> = jobs
        .par_iter()
        .map(|&(si, technique)| {
            let s = &slots[si];
            let (path, g) = paths[si].as_ref().expect("job has a path");
            let profile = TrajectoryProfile { seed: s.seed, ..plan.profile };
            run_trial(g, path, technique, s.task, &plan.config, &profile).map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::with_capacity(jobs.len());
    for (&(si, technique), outcome) in jobs.iter().zip(outcomes) {
        let s = &slots[si];
        let graph = plan.graphs[s.graph];
        match outcome {
            Ok(m) => rows.push(TrialResult {
                technique,
                graph,
                path_kind: s.path_kind,
                task: s.task,
                trial: s.trial,
                seed: s.seed,
                time_s: m.time_s,
                detaches: m.detaches,
                attaches: m.attaches,
                ring_jumps: m.ring_jumps,
                distance_m: m.distance_m,
                completed: m.completed,
            }),
            Err(message) => failures.push(TrialFailure {
                graph,
                path_kind: s.path_kind,
                task: s.task,
                trial: s.trial,
                technique: Some(technique),
                message,
            }),
        }
    }
    Ok(ExperimentResults { rows, failures })
}

pub const RESULTS_HEADER: [&str; 12] = [
    "technique", "graph", "path_kind", "task", "trial", "seed", "time_s", "detaches", "attaches", "ring_jumps",
    "distance_m", "completed",
];

pub fn write_results_csv<W: Write>(rows: &[TrialResult], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.technique.as_str().to_string(),
            r.graph.as_str().to_string(),
            r.path_kind.as_str().to_string(),
            r.task.as_str().to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            format!("{:.6}", r.time_s),
            r.detaches.to_string(),
            r.attaches.to_string(),
            r.ring_jumps.to_string(),
            format!("{:.6}", r.distance_m),
            r.completed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-cell means. Abandoned trials contribute their censored time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub technique: Technique,
    pub graph: GraphKind,
    pub path_kind: PathKind,
    pub task: TaskKind,
    pub trials: u32,
    pub completed: u32,
    pub mean_time_s: f64,
    pub mean_detaches: f64,
    pub mean_attaches: f64,
    pub mean_ring_jumps: f64,
    pub mean_distance_m: f64,
}

pub fn summarize(rows: &[TrialResult]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<(GraphKind, PathKind, TaskKind, Technique), Vec<&TrialResult>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.graph, r.path_kind, r.task, r.technique)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((graph, path_kind, task, technique), rs)| {
            let n = rs.len() as f64;
            let mean = |f: &dyn Fn(&TrialResult) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            CellSummary {
                technique,
                graph,
                path_kind,
                task,
                trials: rs.len() as u32,
                completed: rs.iter().filter(|r| r.completed).count() as u32,
                mean_time_s: mean(&|r| r.time_s),
                mean_detaches: mean(&|r| r.detaches as f64),
                mean_attaches: mean(&|r| r.attaches as f64),
                mean_ring_jumps: mean(&|r| r.ring_jumps as f64),
                mean_distance_m: mean(&|r| r.distance_m),
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(cells: &[CellSummary], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "technique", "graph", "path_kind", "task", "trials", "completed", "mean_time_s", "mean_detaches",
        "mean_attaches", "mean_ring_jumps", "mean_distance_m",
    ])?;
    for c in cells {
        w.write_record([
            c.technique.as_str().to_string(),
            c.graph.as_str().to_string(),
            c.path_kind.as_str().to_string(),
            c.task.as_str().to_string(),
            c.trials.to_string(),
            c.completed.to_string(),
            format!("{:.6}", c.mean_time_s),
            format!("{:.6}", c.mean_detaches),
            format!("{:.6}", c.mean_attaches),
            format!("{:.6}", c.mean_ring_jumps),
            format!("{:.6}", c.mean_distance_m),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_ignore_technique_and_differ_by_slot() {
        let a = trial_seed(7, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, 0);
        assert_eq!(a, trial_seed(7, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, 0));
        assert_ne!(a, trial_seed(7, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, 1));
        assert_ne!(a, trial_seed(8, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, 0));
    }

    #[test]
    fn plan_round_trips_through_toml() {
        let plan = ExperimentPlan::default();
        assert_eq!(ExperimentPlan::from_toml(&plan.to_toml()).unwrap(), plan);
        let partial = ExperimentPlan::from_toml("trials = 2\n[profile]\nspeed = 0.5\n").unwrap();
        assert_eq!(partial.trials, 2);
        assert_eq!(partial.profile.speed, 0.5);
        assert!(ExperimentPlan::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn elastic_left_out_of_tracing() {
        let plan = ExperimentPlan::default();
        assert_eq!(plan.techniques_for(TaskKind::Selection).len(), 5);
        assert_eq!(plan.techniques_for(TaskKind::Tracing), [Technique::BaseLine, Technique::SlidingRing, Technique::MagneticArea]);
    }
}
