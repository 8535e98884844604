use serde::{Deserialize, Serialize};

use crate::engine::{self, EngineEvent, EngineState, GazeSample, StepOutput, Target, Technique, TechniqueConfig};
use crate::engine::NodeVisit;
use crate::geometry::{angle_between, Vec2, Zone};
use crate::graph::{Graph, LinkId, NodeId, PathElement, TaskPath};
use crate::task::{TaskConfig, TaskKind, TaskState};

use super::trajectory::{route, route_walker, Jitter, Route, TrajectoryProfile, Walker, Waypoint};
use super::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialSettings {
    /// Simulated seconds without task progress before a correction.
    pub stall_window: f64,
    /// Hold on a correction target, s.
    pub correction_dwell: f64,
    /// Simulated seconds before a trial is abandoned.
    pub max_time: f64,
    /// Ring moves larger than this in one step count as jumps, m.
    pub ring_jump: f64,
    /// Side distance from which repeated corrections approach, m.
    pub approach_offset: f64,
    /// Distance from the node center at which sliding users aim their slice
    /// exit, m.
    pub slice_exit_reach: f64,
    /// Simulated seconds a tracing attachment may stay off the expected
    /// element before a correction.
    pub reaction_time: f64,
}

impl Default for TrialSettings {
    fn default() -> Self {
        TrialSettings { stall_window: 2.0, correction_dwell: 0.5, max_time: 120.0, ring_jump: 0.1, approach_offset: 0.05, slice_exit_reach: 0.03, reaction_time: 0.3 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialConfig {
    pub technique: TechniqueConfig,
    pub task: TaskConfig,
    pub trial: TrialSettings,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub technique: Technique,
    pub task: TaskKind,
    pub seed: u64,
    /// Clock time for completed trials; time since the clock started (or
    /// since the first sample) when the budget ran out.
    pub time_s: f64,
    pub detaches: u32,
    pub attaches: u32,
    pub ring_jumps: u32,
    pub distance_m: f64,
    pub completed: bool,
    pub corrections: u32,
    pub steps: u32,
}

/// One simulated step as seen by an observer.
pub struct TrialStep<'a> {
    pub sample: GazeSample,
    pub output: &'a StepOutput,
    pub task: &'a TaskState,
    pub correcting: bool,
}

pub fn run_trial(
    g: &Graph,
    path: &TaskPath,
    technique: Technique,
    kind: TaskKind,
    config: &TrialConfig,
    profile: &TrajectoryProfile,
) -> Result<TrialMetrics, SimError> {
    run_trial_observed(g, path, technique, kind, config, profile, |_| {})
}

/// A sliding ring parked on a subpath off the task path has to be walked
/// back through the graph: along its subpath to the cheaper end, then by
/// the shortest route to the last completed path node.
fn detour(g: &Graph, path: &TaskPath, task: &TaskState, state: &EngineState) -> Vec<Waypoint> {
    let Some(Target::Subpath(id)) = state.attachment else { return Vec::new() };
    let sp = g.subpath(id);
    let on_path = match task.next_element() {
        Some(PathElement::Node(n)) => sp.nodes.contains(&n),
        Some(PathElement::Link(l)) => sp.contains_link(l),
        None => true,
    };
    if on_path {
        return Vec::new();
    }
    let last = path.nodes[task.next_index().saturating_sub(1) / 2];
    let Ok((dist, _)) = g.distances_from(last) else { return Vec::new() };
    let (ring, seg) = sp.polyline.point_at(state.ring_arclen);
    let to_start = state.ring_arclen + dist[g.node_index(sp.start())];
    let to_end = sp.total_length() - state.ring_arclen + dist[g.node_index(sp.end())];
    let along: Vec<NodeId> = if to_start <= to_end {
        sp.nodes[..=seg].iter().rev().copied().collect()
    } else {
        sp.nodes[seg + 1..].to_vec()
    };
    let end = *along.last().expect("subpaths have nodes");
    let mut points = vec![Waypoint::at(ring)];
    points.extend(along.iter().map(|&n| Waypoint::node(g, n)));
    if let Ok(Some(nodes)) = g.shortest_route(end, last) {
        points.extend(nodes[1..].iter().map(|&n| Waypoint::node(g, n)));
    }
    points
}

/// Whether the current attachment covers the next expected element.
fn on_track(g: &Graph, task: &TaskState, attachment: Option<Target>) -> bool {
    let Some(e) = task.next_element() else { return true };
    match (attachment, e) {
        (None, _) => true,
        (Some(Target::Subpath(id)), PathElement::Node(n)) => g.subpath(id).nodes.contains(&n),
        (Some(Target::Subpath(id)), PathElement::Link(l)) => g.subpath(id).contains_link(l),
        (Some(Target::Link(a)), PathElement::Node(n)) => g.link(a).is_ok_and(|a| a.touches(n)),
        (Some(Target::Link(a)), PathElement::Link(l)) => a == l,
    }
}

/// Point on link `l` (from `a` to `b`) farthest from every other link.
fn clearest_point(g: &Graph, l: LinkId, a: Vec2, b: Vec2) -> Vec2 {
    let clearance = |p: Vec2| {
        g.links_within(p, a.distance(b))
            .into_iter()
            .filter(|(o, _)| *o != l)
            .map(|(_, pr)| pr.distance)
            .fold(f64::INFINITY, f64::min)
    };
    (2..=8)
        .map(|i| a.lerp(b, i as f64 / 10.0))
        .map(|p| (clearance(p), p))
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, p)| p)
        .expect("non-empty grid")
}

/// Where a correction aims, the path direction there, and the main-route
/// waypoint to resume from.
fn correction(g: &Graph, path: &TaskPath, task: &TaskState, r: &Route) -> (Waypoint, Vec2, usize) {
    let nw = &r.node_waypoints;
    let dir = |k: usize| (g.pos(path.nodes[k + 1]) - g.pos(path.nodes[k])).normalized().expect("links have length");
    match task.next_element() {
        Some(PathElement::Node(_)) | None => {
            let i = (task.next_index() / 2).min(path.nodes.len() - 1);
            (Waypoint::node(g, path.nodes[i]), dir(i.saturating_sub(1)), nw[i] + 1)
        }
        Some(PathElement::Link(_)) => {
            let k = task.next_index() / 2;
            let (a, b) = (g.pos(path.nodes[k]), g.pos(path.nodes[k + 1]));
            let target = match task.kind() {
                TaskKind::Selection => clearest_point(g, path.links[k], a, b),
                TaskKind::Tracing => a.lerp(b, task.frontier() / a.distance(b)),
            };
            (Waypoint::at(target), dir(k), nw[k + 1])
        }
    }
}

/// Bearing inside `zone` closest to `preferred`, kept clear of the edges.
fn slice_exit_bearing(zone: &Zone, preferred: f64) -> f64 {
    let margin = (zone.width / 4.0).min(20.0);
    let d = (preferred - zone.lo).rem_euclid(360.0);
    if d >= margin && d <= zone.width - margin {
        return preferred;
    }
    let (a, b) = (zone.lo + margin, zone.hi() - margin);
    if angle_between(a, preferred) <= angle_between(b, preferred) {
        a
    } else {
        b
    }
}

/// Point a sliding user heads for to leave `visit` toward node `next`:
/// inside the slice drawn for the link between them.
fn slice_exit(g: &Graph, visit: &NodeVisit, next: NodeId, reach: f64) -> Option<Vec2> {
    let link = g.link_between(visit.node, next)?;
    let j = g.incident(visit.node).ok()?.iter().position(|&l| l == link)?;
    let center = g.pos(visit.node);
    let along = (g.pos(next) - center).bearing();
    Some(center + Vec2::from_bearing(slice_exit_bearing(visit.slices.zone(j), along)) * reach)
}

/// Repeated corrections of the same element come in from the sides, then
/// from behind and ahead.
fn approach(target: Vec2, axis: Vec2, retry: u32, offset: f64) -> Option<Vec2> {
    let perp = Vec2::new(-axis.y, axis.x);
    let dirs = [perp, -perp, -axis, axis];
    (retry > 0).then(|| target + dirs[(retry as usize - 1) % dirs.len()] * offset)
}

pub fn run_trial_observed(
    g: &Graph,
    path: &TaskPath,
    technique: Technique,
    kind: TaskKind,
    config: &TrialConfig,
    profile: &TrajectoryProfile,
    mut observe: impl FnMut(&TrialStep),
) -> Result<TrialMetrics, SimError> {
    profile.validate()?;
    let s = &config.trial;
    let mut state = engine::init(technique, g, &config.technique, Some(path.start()))?;
    let mut task = TaskState::new(kind, path.clone());
    let main = route(g, path, kind, profile.corner_overshoot);
    let mut walker = route_walker(&main, profile);
    let mut jitter = Jitter::new(profile);
    let ds = profile.step_length();
    let budget = (s.max_time * profile.sample_rate).ceil() as u32;
    let correction_hold = (s.correction_dwell * profile.sample_rate).round() as u32;

    let mut m = TrialMetrics {
        technique,
        task: kind,
        seed: profile.seed,
        time_s: 0.0,
        detaches: 0,
        attaches: 0,
        ring_jumps: 0,
        distance_m: 0.0,
        completed: false,
        corrections: 0,
        steps: 0,
    };
    let mut ideal = walker.position();
    let mut prev_gaze: Option<Vec2> = None;
    let mut last_progress = 0.0;
    let mut key = task.progress_key();
    let mut correcting = false;
    let mut retries = 0;
    let mut off_since: Option<f64> = None;

    for k in 0..budget {
        let t = k as f64 / profile.sample_rate;
        let gaze = ideal + jitter.next_offset();
        let sample = GazeSample { t, pos: gaze };
        let out = engine::step(&state, sample, g, &config.technique);
        task = task.advance(&out.events, &out.frame, g, &config.task);

        for e in &out.events {
            match e {
                EngineEvent::Detached => m.detaches += 1,
                EngineEvent::Attached { .. } => m.attaches += 1,
                _ => {}
            }
        }
        if technique.is_sliding() {
            if let (Some(Target::Subpath(a)), Some(Target::Subpath(b))) = (state.attachment, out.state.attachment) {
                if a == b && (out.state.ring_arclen - state.ring_arclen).abs() > s.ring_jump {
                    m.ring_jumps += 1;
                }
            }
        }
        if let Some(p) = prev_gaze {
            m.distance_m += p.distance(gaze);
        }
        prev_gaze = Some(gaze);
        m.steps = k + 1;
        observe(&TrialStep { sample, output: &out, task: &task, correcting });
        if let Some(v) = &out.state.in_node {
            if state.in_node.as_ref().map(|p| p.node) != Some(v.node) {
                walker.divert(v.node, |next| slice_exit(g, v, next, s.slice_exit_reach));
            }
        }
        state = out.state;

        if task.done() {
            m.completed = true;
            m.time_s = task.clock().elapsed().expect("completed trial has a clock");
            return Ok(m);
        }
        let now = task.progress_key();
        if now != key {
            key = now;
            last_progress = t;
            retries = 0;
        }
        off_since = match kind == TaskKind::Selection || on_track(g, &task, state.attachment) {
            true => None,
            false => off_since.or(Some(t)),
        };
        let off_track = off_since.is_some_and(|t0| t - t0 >= s.reaction_time);
        let stalled = t - last_progress >= s.stall_window;
        if off_track || stalled {
            off_since = None;
            let (target, axis, resume) = correction(g, path, &task, &main);
            let mut points = vec![Waypoint::at(walker.position())];
            points.extend(detour(g, path, &task, &state));
            if stalled {
                points.extend(approach(target.pos, axis, retries, s.approach_offset).map(Waypoint::at));
                points.push(target.holding(correction_hold));
                retries += 1;
                last_progress = t;
            } else {
                points.push(target);
            }
            let at_target = points.len() - 1;
            points.extend_from_slice(&main.waypoints[resume.min(main.waypoints.len())..]);
            if points.len() > at_target + 1 {
                points.last_mut().expect("non-empty").hold = profile.dwell_steps();
            }
            walker = Walker::new(points);
            m.corrections += 1;
            correcting = true;
        }
        ideal = walker.advance(ds);
    }
    let end = m.steps.saturating_sub(1) as f64 / profile.sample_rate;
    m.time_s = end - task.clock().start.unwrap_or(0.0);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_metro, sample_task_path, PathKind, PathRequest};

    fn fixture(kind: PathKind, seed: u64) -> (Graph, TaskPath) {
        let g = load_metro();
        let (p, g) = sample_task_path(&g, &PathRequest::new(kind, seed)).unwrap();
        (g, p)
    }

    #[test]
    fn noiseless_baseline_selection_finishes_on_route() {
        let (g, p) = fixture(PathKind::Weighted, 5);
        let profile = TrajectoryProfile { jitter_sigma: 0.0, ..Default::default() };
        let m = run_trial(&g, &p, Technique::BaseLine, TaskKind::Selection, &TrialConfig::default(), &profile).unwrap();
        assert!(m.completed);
        assert_eq!(m.corrections, 0);
        let r = route(&g, &p, TaskKind::Selection, profile.corner_overshoot);
        let route_time = r.length() / profile.speed + profile.dwell;
        assert!((m.time_s - route_time).abs() < 0.1, "{} vs {}", m.time_s, route_time);
    }

    #[test]
    fn sliding_ring_never_detaches() {
        for seed in 0..10 {
            let (g, p) = fixture(PathKind::Homogeneous, seed);
            let profile = TrajectoryProfile { seed, ..Default::default() };
            for kind in [TaskKind::Selection, TaskKind::Tracing] {
                let m = run_trial(&g, &p, Technique::SlidingRing, kind, &TrialConfig::default(), &profile).unwrap();
                assert_eq!(m.detaches, 0);
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let (g, p) = fixture(PathKind::Weighted, 1);
        let config = TrialConfig { trial: TrialSettings { max_time: 0.5, ..Default::default() }, ..Default::default() };
        let m = run_trial(&g, &p, Technique::BaseLine, TaskKind::Tracing, &config, &TrajectoryProfile::default()).unwrap();
        assert!(!m.completed);
        assert_eq!(m.steps, 30);
    }

    #[test]
    fn trials_are_deterministic() {
        let (g, p) = fixture(PathKind::Weighted, 2);
        let profile = TrajectoryProfile { seed: 77, ..Default::default() };
        for t in Technique::ALL {
            let a = run_trial(&g, &p, t, TaskKind::Tracing, &TrialConfig::default(), &profile).unwrap();
            let b = run_trial(&g, &p, t, TaskKind::Tracing, &TrialConfig::default(), &profile).unwrap();
            assert_eq!(a, b);
        }
    }
}
