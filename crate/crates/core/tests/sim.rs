mod common;

use common::{grid_graph, slot_path};
use gazenav::engine::Technique;
use gazenav::graph::PathKind;
use gazenav::sim::{
    gen_trajectory, run_experiment, run_trial, summarize, trial_seed, write_results_csv, ExperimentPlan, GraphKind,
    Jitter, TrajectoryFile, TrajectoryProfile,
};
use gazenav::task::TaskKind;
use proptest::prelude::*;

#[test]
fn jitter_has_the_configured_spread() {
    let profile = TrajectoryProfile { seed: 7, ..TrajectoryProfile::default() };
    let mut j = Jitter::new(&profile);
    let n = 200_000;
    let (mut sx, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        let o = j.next_offset();
        sx += o.x;
        sxx += o.x * o.x;
        syy += o.y * o.y;
    }
    let n = n as f64;
    assert!((sx / n).abs() < 2e-3);
    for var in [sxx / n, syy / n] {
        let sigma = var.sqrt();
        assert!((sigma - profile.jitter_sigma).abs() < 0.1 * profile.jitter_sigma, "sigma {sigma}");
    }
}

#[test]
fn silent_jitter_walks_the_route_exactly() {
    let base = grid_graph(GraphKind::Metro);
    let (_, path, g) = slot_path(&base, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, 0);
    let profile = TrajectoryProfile { jitter_sigma: 0.0, ..TrajectoryProfile::default() };
    let samples = gen_trajectory(&g, &path, &profile, TaskKind::Tracing);
    assert_eq!(samples[0].pos, g.pos(path.start()));
    assert_eq!(samples.last().unwrap().pos, g.pos(*path.nodes.last().unwrap()));
    let step = profile.step_length();
    for w in samples.windows(2) {
        assert!(w[0].pos.distance(w[1].pos) <= step + 1e-12);
        assert!((w[1].t - w[0].t - 1.0 / profile.sample_rate).abs() < 1e-12);
    }
}

#[test]
fn trajectory_files_round_trip() {
    let base = grid_graph(GraphKind::Metro);
    let (seed, path, g) = slot_path(&base, GraphKind::Metro, PathKind::Homogeneous, TaskKind::Selection, 2);
    let profile = TrajectoryProfile { seed, ..TrajectoryProfile::default() };
    let samples = gen_trajectory(&g, &path, &profile, TaskKind::Selection);
    let text = serde_json::to_string(&TrajectoryFile::new(profile, &samples)).unwrap();
    let back = TrajectoryFile::parse(&text).unwrap();
    assert_eq!(back.profile, profile);
    assert_eq!(back.gaze_samples(), samples);
    assert!(TrajectoryFile::parse(&text.replacen("\"version\":1", "\"version\":4", 1)).is_err());
}

#[test]
fn trials_are_deterministic_and_pair_across_techniques() {
    let plan = ExperimentPlan::default();
    let base = grid_graph(GraphKind::SmallWorld);
    let (seed, path, g) = slot_path(&base, GraphKind::SmallWorld, PathKind::Weighted, TaskKind::Tracing, 4);
    assert_eq!(seed, trial_seed(plan.master_seed, GraphKind::SmallWorld, PathKind::Weighted, TaskKind::Tracing, 4));
    let profile = TrajectoryProfile { seed, ..plan.profile };
    for t in Technique::ALL {
        let a = run_trial(&g, &path, t, TaskKind::Tracing, &plan.config, &profile).unwrap();
        let b = run_trial(&g, &path, t, TaskKind::Tracing, &plan.config, &profile).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, seed);
        if t.is_sliding() {
            assert_eq!(a.detaches, 0);
        }
    }
}

#[test]
fn small_grid_writes_header_and_one_row_per_trial() {
    let plan = ExperimentPlan {
        techniques: vec![Technique::BaseLine, Technique::MagneticElastic],
        graphs: vec![GraphKind::Metro],
        path_kinds: vec![PathKind::Homogeneous],
        tasks: vec![TaskKind::Selection, TaskKind::Tracing],
        trials: 3,
        ..ExperimentPlan::default()
    };
    let res = run_experiment(&plan).unwrap();
    assert!(res.failures.is_empty());
    let per_task = |task| res.rows.iter().filter(|r| r.task == task).count();
    assert_eq!(per_task(TaskKind::Selection), 6);
    // elastic variants sit out tracing by default
    assert_eq!(per_task(TaskKind::Tracing), if plan.exclude_elastic_tracing { 3 } else { 6 });
    let mut buf = Vec::new();
    write_results_csv(&res.rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("technique,graph,path_kind,task,trial,seed,time_s,detaches,attaches,ring_jumps,distance_m,completed\n"));
    assert_eq!(text.lines().count(), res.rows.len() + 1);
    let cells = summarize(&res.rows);
    assert_eq!(cells.iter().map(|c| c.trials).sum::<u32>() as usize, res.rows.len());
}

#[test]
fn plans_round_trip_through_toml() {
    let plan = ExperimentPlan { trials: 17, master_seed: 99, ..ExperimentPlan::default() };
    let back = ExperimentPlan::from_toml(&plan.to_toml()).unwrap();
    assert_eq!(back.trials, 17);
    assert_eq!(back.master_seed, 99);
    assert_eq!(back.techniques, plan.techniques);
    assert!(ExperimentPlan::from_toml("trials = 0\n").unwrap().validate().is_err());
    assert!(ExperimentPlan::from_toml("trails = 3\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trial_seeds_differ_by_slot(master in any::<u64>(), trial in 0u32..1000) {
        let s = trial_seed(master, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, trial);
        prop_assert_ne!(s, trial_seed(master, GraphKind::SmallWorld, PathKind::Weighted, TaskKind::Tracing, trial));
        prop_assert_ne!(s, trial_seed(master, GraphKind::Metro, PathKind::Homogeneous, TaskKind::Tracing, trial));
        prop_assert_ne!(s, trial_seed(master, GraphKind::Metro, PathKind::Weighted, TaskKind::Selection, trial));
        prop_assert_ne!(s, trial_seed(master, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, trial + 1));
    }
}
