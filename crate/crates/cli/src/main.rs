use std::fs;
use std::io::Write;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use gazenav::engine::{self, Technique};
use gazenav::graph::{generate_small_world, load_graph, load_metro, sample_task_path, save_graph, Graph, PathKind, PathRequest, TaskPath};
use gazenav::session::{serve, Catalog};
use gazenav::sim::{
    gen_trajectory, run_experiment, summarize, write_results_csv, write_summary_csv, ExperimentPlan, GraphKind,
    TrajectoryFile, TrajectoryProfile,
};
use gazenav::task::{TaskKind, TaskState};

#[derive(Parser)]
#[command(name = "gazenav", version, about = "Gaze-cursor graph navigation engine and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph document: the metro fixture or a Watts-Strogatz small world.
    GenGraph {
        #[arg(long, default_value = "small-world")]
        kind: GraphKind,
        #[arg(long, default_value_t = 180)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a 7-link task path and print it as JSON.
    SamplePath {
        /// Graph document, or `metro` for the bundled fixture.
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "weighted")]
        kind: PathKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        require_long_link: bool,
        /// Also write the reweighted graph here.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Script a jittery gaze trajectory along a task path.
    Trajectory {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value = "tracing")]
        task: TaskKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// TOML trajectory profile; defaults otherwise.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the experiment grid and write a results table.
    Simulate {
        /// TOML experiment plan. Flags below override its fields.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "technique")]
        techniques: Vec<Technique>,
        #[arg(long = "graph")]
        graphs: Vec<GraphKind>,
        #[arg(long = "path-kind")]
        path_kinds: Vec<PathKind>,
        #[arg(long = "task")]
        tasks: Vec<TaskKind>,
        #[arg(long)]
        out: PathBuf,
        /// Per-cell means.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Replay a trajectory file through one technique and log every step.
    Replay {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        technique: Technique,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value = "tracing")]
        task: TaskKind,
        /// JSON-lines event log; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the line-delimited JSON session protocol over TCP.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 7878)]
        port: u16,
    },
}

fn read_graph(arg: &str) -> Result<Graph> {
    if arg == "metro" {
        return Ok(load_metro());
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
    load_graph(&text).with_context(|| format!("loading {arg}"))
}

fn read_path(g: &Graph, file: &Path) -> Result<TaskPath> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let path: TaskPath = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
    TaskPath::new(g, path.nodes).context("path does not fit the graph")
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenGraph { kind, n, k, p, seed, out } => {
            let g = match kind {
                GraphKind::Metro => load_metro(),
                GraphKind::SmallWorld => generate_small_world(n, k, p, seed)?,
            };
            fs::write(&out, save_graph(&g))?;
            eprintln!("{} nodes, {} links -> {}", g.nodes().len(), g.links().len(), out.display());
        }
        Command::SamplePath { graph, kind, seed, require_long_link, graph_out } => {
            let g = read_graph(&graph)?;
            let req = PathRequest { require_long_link, ..PathRequest::new(kind, seed) };
            let (path, reweighted) = sample_task_path(&g, &req)?;
            println!("{}", serde_json::to_string_pretty(&path)?);
            if let Some(out) = graph_out {
                fs::write(out, save_graph(&reweighted))?;
            }
        }
        Command::Trajectory { graph, path, task, seed, profile, out } => {
            let g = read_graph(&graph)?;
            let path = read_path(&g, &path)?;
            let base = match profile {
                Some(f) => toml::from_str(&fs::read_to_string(&f)?).with_context(|| format!("parsing {}", f.display()))?,
                None => TrajectoryProfile::default(),
            };
            let profile = TrajectoryProfile { seed, ..base };
            let samples = gen_trajectory(&g, &path, &profile, task);
            fs::write(&out, serde_json::to_string(&TrajectoryFile::new(profile, &samples))?)?;
            eprintln!("{} samples -> {}", samples.len(), out.display());
        }
        Command::Simulate { plan, trials, seed, techniques, graphs, path_kinds, tasks, out, summary } => {
            let mut plan = match plan {
                Some(f) => ExperimentPlan::from_toml(&fs::read_to_string(&f)?)?,
                None => ExperimentPlan::default(),
            };
            if let Some(t) = trials {
                plan.trials = t;
            }
            if let Some(s) = seed {
                plan.master_seed = s;
            }
            if !techniques.is_empty() {
                plan.techniques = techniques;
            }
            if !graphs.is_empty() {
                plan.graphs = graphs;
            }
            if !path_kinds.is_empty() {
                plan.path_kinds = path_kinds;
            }
            if !tasks.is_empty() {
                plan.tasks = tasks;
            }
            let res = run_experiment(&plan)?;
            write_results_csv(&res.rows, fs::File::create(&out)?)?;
            if let Some(f) = summary {
                write_summary_csv(&summarize(&res.rows), fs::File::create(f)?)?;
            }
            for f in &res.failures {
                eprintln!("trial failed: {f:?}");
            }
            eprintln!("{} rows -> {}", res.rows.len(), out.display());
        }
        Command::Replay { trajectory, technique, graph, path, task, out } => {
            let g = read_graph(&graph)?;
            let path = read_path(&g, &path)?;
            let traj = TrajectoryFile::parse(&fs::read_to_string(&trajectory)?)?;
            let config = gazenav::sim::TrialConfig::default();
            let mut state = engine::init(technique, &g, &config.technique, Some(path.start()))?;
            let mut progress = TaskState::new(task, path);
            let mut sink: Box<dyn Write> = match out {
                Some(f) => Box::new(std::io::BufWriter::new(fs::File::create(f)?)),
                None => Box::new(std::io::stdout().lock()),
            };
            for sample in traj.gaze_samples() {
                let step = engine::step(&state, sample, &g, &config.technique);
                progress = progress.advance(&step.events, &step.frame, &g, &config.task);
                let line = serde_json::json!({
                    "t": sample.t,
                    "gaze": sample.pos,
                    "tracer": step.frame.tracer,
                    "events": step.events,
                    "next_element": progress.next_index(),
                    "done": progress.done(),
                });
                writeln!(sink, "{line}")?;
                state = step.state;
            }
            sink.flush()?;
            if !progress.done() {
                eprintln!("trajectory ended before the task completed");
            }
        }
        Command::Serve { host, port } => {
            let listener = TcpListener::bind((host.as_str(), port)).with_context(|| format!("binding {host}:{port}"))?;
            eprintln!("listening on {}", listener.local_addr()?);
            serve(listener, Arc::new(Catalog::default()))?;
        }
    }
    Ok(())
}
