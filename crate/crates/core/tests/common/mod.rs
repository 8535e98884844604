//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use gazenav::engine::{self, magnetic_value, EngineEvent, GazeSample, Target, Technique, TechniqueConfig};
use gazenav::geometry::{wrap_deg, Vec2};
use gazenav::graph::{sample_task_path, Extent, Graph, Link, LinkId, Node, NodeId, PathKind, PathRequest, TaskPath};
use gazenav::sim::{build_graph, run_trial_observed, trial_seed, ExperimentPlan, GraphKind, TrajectoryProfile};
use gazenav::task::TaskKind;

/// Grid-search answer for the fan rotation.
#[derive(Clone, Copy, Debug)]
pub struct GridRotation {
    pub theta: f64,
    /// Length of the mean proxy-to-link offset vector. Near zero every
    /// rotation scores the same and the optimum is not unique.
    pub resultant: f64,
}

/// Rotation maximizing the summed cosine between the weighted proxies and
/// their parent links, found by exhaustive search on a `step_deg` grid.
pub fn procrustes_grid(angles: &[f64], weights: &[u32], step_deg: f64) -> GridRotation {
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&i, &j| angles[i].rem_euclid(360.0).total_cmp(&angles[j].rem_euclid(360.0)).then(i.cmp(&j)));
    let parents: Vec<usize> = order.iter().flat_map(|&i| std::iter::repeat_n(i, weights[i] as usize)).collect();
    let spacing = 360.0 / parents.len() as f64;
    let offsets: Vec<f64> = parents.iter().enumerate().map(|(j, &i)| (angles[i] - j as f64 * spacing).to_radians()).collect();
    let score = |theta: f64| -> f64 { offsets.iter().map(|d| (d - theta.to_radians()).cos()).sum() };
    let n = (360.0 / step_deg).round() as usize;
    let theta = (0..n)
        .map(|k| k as f64 * step_deg - 180.0)
        .max_by(|&a, &b| score(a).total_cmp(&score(b)))
        .expect("nonempty grid");
    let (s, c) = offsets.iter().fold((0.0, 0.0), |(s, c), d| (s + d.sin(), c + d.cos()));
    GridRotation { theta, resultant: s.hypot(c) / offsets.len() as f64 }
}

/// Below this mean resultant the fan rotation is ambiguous.
pub const DEGENERATE_RESULTANT: f64 = 1e-6;

pub fn angle_gap(a: f64, b: f64) -> f64 {
    wrap_deg(a - b).abs()
}

/// Lowest magnetic value over every link of the graph within the
/// influence radius; the current link keeps ties, then the lower id.
pub fn magnetic_argmin(g: &Graph, gaze: Vec2, current: Option<LinkId>, cfg: &TechniqueConfig) -> Option<LinkId> {
    g.links()
        .iter()
        .filter_map(|l| {
            let d = g.project_on_link(l.id, gaze).distance;
            (d <= cfg.influence_radius).then(|| {
                let attached = Some(l.id) == current;
                (magnetic_value(d, l.weight, g.max_weight(), attached, cfg), !attached, l.id)
            })
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)))
        .map(|(_, _, l)| l)
}

/// Distance from `p` to segment `ab` by dense sampling (an upper bound
/// within `|ab| / samples` of the true distance).
pub fn sampled_segment_distance(p: Vec2, a: Vec2, b: Vec2, samples: usize) -> f64 {
    (0..=samples).map(|k| p.distance(a.lerp(b, k as f64 / samples as f64))).fold(f64::INFINITY, f64::min)
}

/// Two straight links crossing at (1, 1): `a` horizontal, `b` vertical.
pub fn crossing_graph(w_attached: u32, w_crossing: u32) -> Graph {
    let nodes = [(0.2, 1.0), (1.8, 1.0), (1.0, 0.2), (1.0, 1.8)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Node { id: NodeId(i as u32), pos: Vec2::new(x, y) })
        .collect();
    let links = vec![
        Link { id: LinkId(0), a: NodeId(0), b: NodeId(1), weight: w_attached },
        Link { id: LinkId(1), a: NodeId(2), b: NodeId(3), weight: w_crossing },
    ];
    Graph::new(Extent { w: 2.0, h: 2.0 }, nodes, links).expect("valid crossing graph")
}

/// Attaches a magnetic cursor to the horizontal link, walks to the crossing
/// and then up the vertical link in `step` increments. Returns the offset
/// from the horizontal link at the first detachment, if any happened
/// within `until` meters.
pub fn crossing_detach_offset(g: &Graph, cfg: &TechniqueConfig, step: f64, until: f64) -> Option<f64> {
    let mut state = engine::init(Technique::MagneticArea, g, cfg, None).expect("valid config");
    let mut t = 0.0;
    let mut feed = |state: &mut engine::EngineState, p: Vec2| {
        t += 1.0 / 60.0;
        let out = engine::step(state, GazeSample { t, pos: p }, g, cfg);
        *state = out.state;
        out.events
    };
    let mut x = 0.5;
    while x < 1.0 {
        feed(&mut state, Vec2::new(x, 1.0));
        x += 0.01;
    }
    feed(&mut state, Vec2::new(1.0, 1.0));
    assert_eq!(state.attachment, Some(Target::Link(LinkId(0))));
    let steps = (until / step).round() as usize;
    for k in 1..=steps {
        let dy = k as f64 * step;
        if feed(&mut state, Vec2::new(1.0, 1.0 + dy)).contains(&EngineEvent::Detached) {
            return Some(dy);
        }
    }
    None
}

/// What one sliding trial looked like from the inside.
#[derive(Debug, Default)]
pub struct PersistenceReport {
    pub steps: usize,
    pub detaches: usize,
    /// Largest distance of the ring's source point from its subpath.
    pub max_ring_offset: f64,
    /// Largest distance of a drawn elastic ring from its deformed curve.
    pub max_elastic_offset: f64,
    pub ring_missing: usize,
}

pub fn grid_graph(kind: GraphKind) -> Graph {
    build_graph(kind, &ExperimentPlan::default().small_world).expect("default graphs build")
}

/// Task path and reweighted graph for one experiment slot, as the grid
/// runner would sample it.
pub fn slot_path(base: &Graph, graph: GraphKind, path_kind: PathKind, task: TaskKind, trial: u32) -> (u64, TaskPath, Graph) {
    let plan = ExperimentPlan::default();
    let seed = trial_seed(plan.master_seed, graph, path_kind, task, trial);
    let req = PathRequest {
        length: plan.path.length,
        kind: path_kind,
        require_long_link: plan.path.require_long_link,
        avoid_crossings: plan.path.avoid_crossings,
        seed,
    };
    let (path, g) = sample_task_path(base, &req).expect("path samples");
    (seed, path, g)
}

pub fn sliding_persistence(g: &Graph, path: &TaskPath, technique: Technique, task: TaskKind, seed: u64) -> PersistenceReport {
    let plan = ExperimentPlan::default();
    let profile = TrajectoryProfile { seed, ..plan.profile };
    let mut rep = PersistenceReport::default();
    run_trial_observed(g, path, technique, task, &plan.config, &profile, |step| {
        rep.steps += 1;
        rep.detaches += step.output.events.iter().filter(|e| matches!(e, EngineEvent::Detached)).count();
        if let Some(Target::Subpath(id)) = step.output.state.attachment {
            let frame = &step.output.frame;
            let sp = g.subpath(id);
            rep.max_ring_offset = rep.max_ring_offset.max(sp.polyline.project(frame.tracer).distance);
            match (frame.ring, &frame.elastic) {
                (Some(ring), Some(e)) => {
                    rep.max_elastic_offset = rep.max_elastic_offset.max(e.curve.polyline().project(ring).distance);
                }
                (Some(ring), None) => {
                    rep.max_ring_offset = rep.max_ring_offset.max(sp.polyline.project(ring).distance);
                }
                (None, _) => rep.ring_missing += 1,
            }
        }
    })
    .expect("trial runs");
    rep
}
