//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

mod common;

use std::time::{Duration, Instant};

use common::{
    angle_gap, crossing_detach_offset, crossing_graph, grid_graph, procrustes_grid, sliding_persistence, slot_path,
    DEGENERATE_RESULTANT,
};
use gazenav::engine::{magnetic_value, Technique, TechniqueConfig};
use gazenav::geometry::{fan_slices, project_point_segment, Vec2};
use gazenav::graph::{PathElement, PathKind};
use gazenav::sim::{run_experiment, run_trial_observed, summarize, write_results_csv, ExperimentPlan, GraphKind, TrajectoryProfile};
use gazenav::task::{advance_tracing, TaskConfig, TaskKind, TracingTaskState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const FAN_CONFIGS: usize = 1000;
const FAN_GRID_STEP_DEG: f64 = 0.05;
const FAN_MATCH_DEG: f64 = 0.5;
const FAN_BUDGET: Duration = Duration::from_secs(5);
const SLICE_TOL_DEG: f64 = 1e-6;
const PERSISTENCE_TRIALS: u32 = 500;
const RING_TOL_M: f64 = 1e-9;
const HYSTERESIS_M: f64 = 0.025;
const CROSSING_STEP_M: f64 = 1e-4;
const TRACE_TOL_M: f64 = 1e-6;
const FUZZ_STREAMS: usize = 50;
const FUZZ_STEPS: usize = 10_000;
const DIRECTIONAL_SEEDS: u32 = 250;
const TRACING_BUDGET: Duration = Duration::from_secs(120);
const DETERMINISM_TRIALS: u32 = 20;

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

fn procrustes(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let configs: Vec<(Vec<f64>, Vec<u32>)> = (0..FAN_CONFIGS)
        .map(|_| {
            let n = rng.random_range(1..=8);
            ((0..n).map(|_| rng.random_range(0.0..360.0)).collect(), (0..n).map(|_| rng.random_range(1..=3)).collect())
        })
        .collect();
    let start = Instant::now();
    let (mut worst, mut degenerate) = (0.0f64, 0);
    for (angles, weights) in &configs {
        let s = fan_slices(angles, weights).expect("valid fan");
        let grid = procrustes_grid(angles, weights, FAN_GRID_STEP_DEG);
        if grid.resultant <= DEGENERATE_RESULTANT {
            degenerate += 1;
            continue;
        }
        worst = worst.max(angle_gap(s.rotation, grid.theta));
    }
    let took = start.elapsed();
    r.check(
        "procrustes oracle",
        worst <= FAN_MATCH_DEG && took < FAN_BUDGET,
        format!(
            "{FAN_CONFIGS} fans, worst gap {worst:.4} deg (limit {FAN_MATCH_DEG}), {degenerate} rotation-free fans skipped, {:.2} s (limit {} s)",
            took.as_secs_f64(),
            FAN_BUDGET.as_secs()
        ),
    );
}

fn slice_law(r: &mut Report) {
    let s = fan_slices(&[0.0, 180.0], &[3, 1]).expect("valid fan");
    let proxies = s.proxies.iter().filter(|p| p.link == 0).count();
    let w0 = s.zone(0).width;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..FAN_CONFIGS {
        let n = rng.random_range(1..=8);
        let angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..360.0)).collect();
        let weights: Vec<u32> = (0..n).map(|_| rng.random_range(1..=3)).collect();
        let total: u32 = weights.iter().sum();
        let s = fan_slices(&angles, &weights).expect("valid fan");
        for (i, &w) in weights.iter().enumerate() {
            worst = worst.max((s.zone(i).width - f64::from(w) / f64::from(total) * 360.0).abs());
        }
    }
    r.check(
        "slice-weight law",
        (w0 - 270.0).abs() <= SLICE_TOL_DEG && proxies == 3 && s.proxies.len() == 4 && worst <= SLICE_TOL_DEG,
        format!("0/180 deg fan gives {w0} deg with {proxies} of {} proxies; {FAN_CONFIGS} random fans off by at most {worst:.1e} deg", s.proxies.len()),
    );
}

fn persistence(r: &mut Report) {
    let graphs = [GraphKind::Metro, GraphKind::SmallWorld];
    let kinds = [PathKind::Weighted, PathKind::Homogeneous];
    let bases: Vec<_> = graphs.iter().map(|&k| grid_graph(k)).collect();
    let per_cell = PERSISTENCE_TRIALS / 4;
    let jobs: Vec<_> = (0..2).flat_map(|gi| kinds.iter().flat_map(move |&pk| (0..per_cell).map(move |t| (gi, pk, t)))).collect();
    let reports: Vec<_> = jobs
        .par_iter()
        .map(|&(gi, pk, t)| {
            let technique = if t % 2 == 0 { Technique::SlidingRing } else { Technique::SlidingElastic };
            let task = if (t / 2) % 2 == 0 { TaskKind::Tracing } else { TaskKind::Selection };
            let (seed, path, g) = slot_path(&bases[gi], graphs[gi], pk, task, t);
            sliding_persistence(&g, &path, technique, task, seed)
        })
        .collect();
    let detaches: usize = reports.iter().map(|p| p.detaches).sum();
    let steps: usize = reports.iter().map(|p| p.steps).sum();
    let missing: usize = reports.iter().map(|p| p.ring_missing).sum();
    let ring = reports.iter().map(|p| p.max_ring_offset).fold(0.0, f64::max);
    let elastic = reports.iter().map(|p| p.max_elastic_offset).fold(0.0, f64::max);
    r.check(
        "sliding persistence",
        detaches == 0 && missing == 0 && ring < RING_TOL_M && elastic < RING_TOL_M,
        format!(
            "{} trials, {steps} steps, {detaches} detaches, ring off subpath by at most {ring:.1e} m, elastic ring off its curve by at most {elastic:.1e} m (limit {RING_TOL_M:.0e})",
            reports.len()
        ),
    );
}

fn hysteresis(r: &mut Report) {
    let cfg = TechniqueConfig::default();
    let boundary = cfg.c1 - cfg.c1 * cfg.c_attached;
    let heavy_boundary = cfg.c1 * 3.0 - cfg.c1 * cfg.c_attached;
    let analytic = (boundary - HYSTERESIS_M).abs() < 1e-12
        && magnetic_value(HYSTERESIS_M - 1e-6, 1, 1, true, &cfg) < magnetic_value(0.0, 1, 1, false, &cfg)
        && magnetic_value(HYSTERESIS_M + 1e-6, 1, 1, true, &cfg) > magnetic_value(0.0, 1, 1, false, &cfg)
        && heavy_boundary > cfg.influence_radius;
    let homogeneous = crossing_detach_offset(&crossing_graph(1, 1), &cfg, CROSSING_STEP_M, cfg.influence_radius);
    let heavy = crossing_detach_offset(&crossing_graph(3, 1), &cfg, CROSSING_STEP_M, cfg.influence_radius + 0.01);
    let homo_ok = homogeneous.is_some_and(|d| d > HYSTERESIS_M - 1e-12 && d <= HYSTERESIS_M + CROSSING_STEP_M + 1e-12);
    let heavy_ok = heavy.is_some_and(|d| d >= cfg.influence_radius - 1e-9);
    r.check(
        "magnetic hysteresis thresholds",
        analytic && homo_ok && heavy_ok,
        format!(
            "analytic boundary {boundary:.4} m (w=1/1), {heavy_boundary:.3} m (w=3 over w=1) vs R {}; simulated detach at {:?} m and {:?} m",
            cfg.influence_radius,
            homogeneous,
            heavy
        ),
    );
}

fn tracing_bookkeeping(r: &mut Report) {
    let plan = ExperimentPlan::default();
    let base = grid_graph(GraphKind::Metro);
    let mut worst = 0.0f64;
    let mut finished = 0;
    let techniques = [Technique::BaseLine, Technique::SlidingRing, Technique::MagneticArea];
    for trial in 0..10 {
        let (seed, path, g) = slot_path(&base, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, trial);
        for technique in techniques {
            let profile = TrajectoryProfile { seed, ..plan.profile };
            let (mut credited, mut prev, mut done) = (0.0, 0, false);
            run_trial_observed(&g, &path, technique, TaskKind::Tracing, &plan.config, &profile, |step| {
                let next = step.task.next_index();
                for idx in prev..next {
                    if let PathElement::Link(_) = step.task.path().elements()[idx] {
                        let (from, to) = (g.pos(path.nodes[idx / 2]), g.pos(path.nodes[idx / 2 + 1]));
                        credited += project_point_segment(step.output.frame.tracer, from, to).expect("link").arclen;
                    }
                }
                prev = next;
                done = step.task.done();
            })
            .expect("trial runs");
            if done {
                finished += 1;
                worst = worst.max((credited - path.length(&g)).abs());
            }
        }
    }

    let (_, path, g) = slot_path(&base, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, 0);
    let cfg = TaskConfig::default();
    let pts: Vec<Vec2> = path.nodes.iter().map(|&n| g.pos(n)).collect();
    let mut violations = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..FUZZ_STREAMS {
        let mut st = TracingTaskState::new(path.clone());
        let mut key = (0usize, 0.0f64);
        let mut p = pts[0];
        for i in 0..FUZZ_STEPS {
            p = match rng.random_range(0..100) {
                0..=79 => {
                    let k = rng.random_range(0..pts.len() - 1);
                    let target = pts[k].lerp(pts[k + 1], rng.random_range(0.0..1.0));
                    p + (target - p) * 0.02 + Vec2::new(rng.random_range(-0.005..0.005), rng.random_range(-0.005..0.005))
                }
                80..=97 => p + Vec2::new(rng.random_range(-0.01..0.01), rng.random_range(-0.01..0.01)),
                _ => Vec2::new(rng.random_range(0.0..2.0), rng.random_range(0.0..1.96)),
            };
            st = advance_tracing(&st, p, i as f64 / 60.0, &g, &cfg);
            let now = (st.next_index, st.frontier);
            if now.0 < key.0 || (now.0 == key.0 && now.1 < key.1) {
                violations += 1;
            }
            key = now;
        }
    }
    r.check(
        "tracing bookkeeping",
        finished > 0 && worst <= TRACE_TOL_M && violations == 0,
        format!(
            "{finished}/{} completed trials credit the path length within {worst:.1e} m (limit {TRACE_TOL_M:.0e}); {FUZZ_STREAMS} x {FUZZ_STEPS}-step fuzz streams, {violations} frontier regressions",
            10 * techniques.len()
        ),
    );
}

fn mean_time(rows: &[gazenav::sim::TrialResult], techniques: &[Technique], graph: GraphKind) -> f64 {
    let times: Vec<f64> = rows.iter().filter(|r| r.graph == graph && techniques.contains(&r.technique)).map(|r| r.time_s).collect();
    times.iter().sum::<f64>() / times.len() as f64
}

fn tracing_directional(r: &mut Report) {
    let plan = ExperimentPlan {
        techniques: vec![Technique::SlidingRing, Technique::MagneticArea, Technique::BaseLine],
        graphs: vec![GraphKind::Metro, GraphKind::SmallWorld],
        path_kinds: vec![PathKind::Weighted],
        tasks: vec![TaskKind::Tracing],
        trials: DIRECTIONAL_SEEDS,
        ..ExperimentPlan::default()
    };
    let start = Instant::now();
    let res = run_experiment(&plan).expect("grid runs");
    let took = start.elapsed();
    let mut ok = res.failures.is_empty() && took < TRACING_BUDGET;
    let mut detail = Vec::new();
    for g in [GraphKind::Metro, GraphKind::SmallWorld] {
        let [sr, ma, bl] = [Technique::SlidingRing, Technique::MagneticArea, Technique::BaseLine].map(|t| mean_time(&res.rows, &[t], g));
        ok &= sr < ma && ma < bl;
        detail.push(format!("{}: SR {sr:.2} < MA {ma:.2} < BL {bl:.2} s", g.as_str()));
    }
    r.check(
        "tracing directional",
        ok,
        format!("{DIRECTIONAL_SEEDS} seeds; {}; {:.1} s (limit {} s)", detail.join(", "), took.as_secs_f64(), TRACING_BUDGET.as_secs()),
    );
}

fn selection_directional(r: &mut Report) {
    let magnetic = [Technique::MagneticArea, Technique::MagneticElastic];
    let sliding = [Technique::SlidingRing, Technique::SlidingElastic];
    let plan = ExperimentPlan {
        techniques: magnetic.iter().chain(&sliding).copied().collect(),
        graphs: vec![GraphKind::SmallWorld],
        path_kinds: vec![PathKind::Homogeneous],
        tasks: vec![TaskKind::Selection],
        trials: DIRECTIONAL_SEEDS,
        ..ExperimentPlan::default()
    };
    let res = run_experiment(&plan).expect("grid runs");
    let m = mean_time(&res.rows, &magnetic, GraphKind::SmallWorld);
    let s = mean_time(&res.rows, &sliding, GraphKind::SmallWorld);
    let each: Vec<String> =
        plan.techniques.iter().map(|&t| format!("{} {:.2}", t.as_str(), mean_time(&res.rows, &[t], GraphKind::SmallWorld))).collect();
    r.check(
        "selection directional",
        res.failures.is_empty() && m < s,
        format!("{DIRECTIONAL_SEEDS} seeds, homogeneous small world: magnetic {m:.2} s < sliding {s:.2} s ({})", each.join(", ")),
    );
}

fn determinism(r: &mut Report) {
    let plan = ExperimentPlan { trials: DETERMINISM_TRIALS, ..ExperimentPlan::default() };
    let csv = || {
        let res = run_experiment(&plan).expect("grid runs");
        let mut buf = Vec::new();
        write_results_csv(&res.rows, &mut buf).expect("csv writes");
        (buf, res.rows.len(), summarize(&res.rows).len())
    };
    let (a, rows, cells) = csv();
    let (b, _, _) = csv();
    r.check(
        "determinism",
        a == b && rows > 0,
        format!("full grid ({cells} cells, {rows} rows, {} bytes) rerun byte-identical: {}", a.len(), a == b),
    );
}

fn main() {
    let mut r = Report { failed: 0 };
    procrustes(&mut r);
    slice_law(&mut r);
    persistence(&mut r);
    hysteresis(&mut r);
    tracing_bookkeeping(&mut r);
    tracing_directional(&mut r);
    selection_directional(&mut r);
    determinism(&mut r);
    if r.failed > 0 {
        println!("{} criteria failed", r.failed);
        std::process::exit(1);
    }
}
