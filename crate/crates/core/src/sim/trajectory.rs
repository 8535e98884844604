use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::engine::GazeSample;
use crate::geometry::Vec2;
use crate::graph::{Graph, NodeId, TaskPath};
use crate::task::TaskKind;

use super::SimError;

pub const TRAJECTORY_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryProfile {
    /// Cursor speed along the route, m/s.
    pub speed: f64,
    /// Stationary standard deviation of the jitter per axis, m.
    pub jitter_sigma: f64,
    /// Low-pass cutoff of the jitter, Hz.
    pub jitter_cutoff: f64,
    pub sample_rate: f64,
    /// Distance the route runs past a corner before turning, m.
    pub corner_overshoot: f64,
    /// Hold at the start and end of the route, s.
    pub dwell: f64,
    pub seed: u64,
}

impl Default for TrajectoryProfile {
    fn default() -> Self {
        TrajectoryProfile {
            speed: 0.3,
            jitter_sigma: 0.01,
            jitter_cutoff: 2.0,
            sample_rate: 60.0,
            corner_overshoot: 0.02,
            dwell: 0.25,
            seed: 0,
        }
    }
}

impl TrajectoryProfile {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |what: &str| Err(SimError::InvalidProfile(what.to_string()));
        let finite = [self.speed, self.jitter_sigma, self.jitter_cutoff, self.sample_rate, self.corner_overshoot, self.dwell];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("non-finite value");
        }
        if self.speed <= 0.0 || self.jitter_cutoff <= 0.0 || self.sample_rate <= 0.0 {
            return bad("speed, jitter_cutoff and sample_rate must be positive");
        }
        if self.jitter_sigma < 0.0 || self.corner_overshoot < 0.0 || self.dwell < 0.0 {
            return bad("jitter_sigma, corner_overshoot and dwell must be non-negative");
        }
        if self.sample_rate < 2.0 * self.jitter_cutoff {
            return bad("sample_rate must be at least twice jitter_cutoff");
        }
        Ok(())
    }

    pub fn step_length(&self) -> f64 {
        self.speed / self.sample_rate
    }

    pub fn dwell_steps(&self) -> u32 {
        (self.dwell * self.sample_rate).round() as u32
    }
}

/// First-order low-pass filtered Gaussian noise in 2D. The input variance is
/// scaled so that the filtered output has standard deviation `sigma`, and
/// the filter starts in its stationary distribution.
#[derive(Clone, Debug)]
pub struct Jitter {
    rng: ChaCha8Rng,
    input: Option<Normal<f64>>,
    alpha: f64,
    state: Vec2,
}

impl Jitter {
    pub fn new(profile: &TrajectoryProfile) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
        let alpha = 1.0 - (-2.0 * std::f64::consts::PI * profile.jitter_cutoff / profile.sample_rate).exp();
        if profile.jitter_sigma == 0.0 {
            return Jitter { rng, input: None, alpha, state: Vec2::ZERO };
        }
        let sigma = profile.jitter_sigma;
        let stationary = Normal::new(0.0, sigma).expect("positive sigma");
        let state = Vec2::new(stationary.sample(&mut rng), stationary.sample(&mut rng));
        let input = Normal::new(0.0, sigma * ((2.0 - alpha) / alpha).sqrt()).expect("positive sigma");
        Jitter { rng, input: Some(input), alpha, state }
    }

    pub fn next_offset(&mut self) -> Vec2 {
        let Some(input) = self.input else {
            return Vec2::ZERO;
        };
        let x = Vec2::new(input.sample(&mut self.rng), input.sample(&mut self.rng));
        self.state = self.state + (x - self.state) * self.alpha;
        self.state
    }
}

/// Route point. Points tagged with a node belong to that node's passage
/// (its center, and the overshoot beyond it).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Waypoint {
    pub pos: Vec2,
    pub node: Option<NodeId>,
    /// Steps spent standing here once reached.
    pub hold: u32,
}

impl Waypoint {
    pub fn at(pos: Vec2) -> Self {
        Waypoint { pos, node: None, hold: 0 }
    }

    pub fn node(g: &Graph, n: NodeId) -> Self {
        Waypoint { pos: g.pos(n), node: Some(n), hold: 0 }
    }

    pub fn tagged(pos: Vec2, n: NodeId) -> Self {
        Waypoint { pos, node: Some(n), hold: 0 }
    }

    pub fn holding(self, hold: u32) -> Self {
        Waypoint { hold, ..self }
    }
}

/// Walks a waypoint route at a fixed step length.
#[derive(Clone, Debug, PartialEq)]
pub struct Walker {
    points: Vec<Waypoint>,
    next: usize,
    pos: Vec2,
    hold_left: u32,
}

impl Walker {
    pub fn new(points: Vec<Waypoint>) -> Self {
        assert!(!points.is_empty());
        let pos = points[0].pos;
        let hold_left = points[0].hold;
        Walker { points, next: 1, pos, hold_left }
    }

    pub fn position(&self) -> Vec2 {
        self.pos
    }

    pub fn finished(&self) -> bool {
        self.next >= self.points.len() && self.hold_left == 0
    }

    /// Waypoints not reached yet.
    pub fn remaining(&self) -> &[Waypoint] {
        &self.points[self.next.min(self.points.len())..]
    }

    /// Moves `ds` along the route (less if a hold interrupts) and returns
    /// the new position.
    pub fn advance(&mut self, ds: f64) -> Vec2 {
        if self.hold_left > 0 {
            self.hold_left -= 1;
            return self.pos;
        }
        let mut left = ds;
        while self.next < self.points.len() {
            let target = self.points[self.next];
            let gap = self.pos.distance(target.pos);
            if gap > left {
                self.pos = self.pos + (target.pos - self.pos) * (left / gap);
                break;
            }
            left -= gap;
            self.pos = target.pos;
            self.hold_left = target.hold;
            self.next += 1;
            if self.hold_left > 0 {
                break;
            }
        }
        self.pos
    }

    /// Replaces the rest of `node`'s passage with a straight exit to the
    /// point returned by `exit`, which receives the node visited after it.
    /// Applies only while `node` is the passage being walked.
    pub fn divert(&mut self, node: NodeId, exit: impl FnOnce(NodeId) -> Option<Vec2>) -> bool {
        let tagged = |w: &Waypoint| w.node == Some(node);
        let first = self.next.min(self.points.len());
        let from = if first > 0 && tagged(&self.points[first - 1]) {
            first
        } else {
            match self.points[first..].iter().position(|w| w.node.is_some()) {
                Some(i) if tagged(&self.points[first + i]) => first + i + 1,
                _ => return false,
            }
        };
        let mut to = from;
        while to < self.points.len() && tagged(&self.points[to]) {
            to += 1;
        }
        let Some(after) = self.points[to..].iter().filter_map(|w| w.node).find(|&n| n != node) else { return false };
        let Some(p) = exit(after) else { return false };
        let hold = self.points[from..to].last().map_or(0, |w| w.hold);
        self.points.splice(from..to, [Waypoint::at(p).holding(hold)]);
        true
    }
}

/// Ideal route through a task path, with the waypoint index of every path
/// node.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    pub waypoints: Vec<Waypoint>,
    pub node_waypoints: Vec<usize>,
}

impl Route {
    pub fn points(&self) -> Vec<Vec2> {
        self.waypoints.iter().map(|w| w.pos).collect()
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].pos.distance(w[1].pos)).sum()
    }
}

/// Selection runs straight node to node, overshooting each corner and
/// cutting to the next node from there. Tracing runs along the links,
/// overshooting each corner and returning to the node before turning.
pub fn route(g: &Graph, path: &TaskPath, kind: TaskKind, overshoot: f64) -> Route {
    let nodes = &path.nodes;
    let mut waypoints = vec![Waypoint::node(g, nodes[0])];
    let mut node_waypoints = vec![0];
    for i in 1..nodes.len() {
        node_waypoints.push(waypoints.len());
        waypoints.push(Waypoint::node(g, nodes[i]));
        if i + 1 < nodes.len() && overshoot > 0.0 {
            let (p, q) = (g.pos(nodes[i - 1]), g.pos(nodes[i]));
            let past = q + (q - p).normalized().expect("links have length") * overshoot;
            waypoints.push(Waypoint::tagged(past, nodes[i]));
            if kind == TaskKind::Tracing {
                waypoints.push(Waypoint::node(g, nodes[i]));
            }
        }
    }
    Route { waypoints, node_waypoints }
}

/// Adds jitter to a walker until it finishes.
pub fn walk(mut walker: Walker, profile: &TrajectoryProfile) -> Vec<GazeSample> {
    let mut jitter = Jitter::new(profile);
    let ds = profile.step_length();
    let mut out = Vec::new();
    let mut p = walker.position();
    loop {
        let t = out.len() as f64 / profile.sample_rate;
        let q = p + jitter.next_offset();
        out.push(GazeSample::new(t, q.x, q.y));
        if walker.finished() {
            break;
        }
        p = walker.advance(ds);
    }
    out
}

pub(crate) fn route_walker(r: &Route, profile: &TrajectoryProfile) -> Walker {
    let mut points = r.waypoints.clone();
    points[0].hold = profile.dwell_steps();
    points.last_mut().expect("non-empty route").hold = profile.dwell_steps();
    Walker::new(points)
}

/// Scripted gaze samples for one task path, deterministic per
/// `profile.seed`.
pub fn gen_trajectory(g: &Graph, path: &TaskPath, profile: &TrajectoryProfile, kind: TaskKind) -> Vec<GazeSample> {
    let r = route(g, path, kind, profile.corner_overshoot);
    walk(route_walker(&r, profile), profile)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub version: u32,
    pub profile: TrajectoryProfile,
    pub samples: Vec<TrajectorySample>,
}

impl TrajectoryFile {
    pub fn new(profile: TrajectoryProfile, samples: &[GazeSample]) -> Self {
        TrajectoryFile {
            version: TRAJECTORY_FORMAT_VERSION,
            profile,
            samples: samples.iter().map(|s| TrajectorySample { t: s.t, x: s.pos.x, y: s.pos.y }).collect(),
        }
    }

    pub fn gaze_samples(&self) -> Vec<GazeSample> {
        self.samples.iter().map(|s| GazeSample::new(s.t, s.x, s.y)).collect()
    }

    pub fn parse(text: &str) -> Result<Self, SimError> {
        let f: TrajectoryFile = serde_json::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
        if f.version != TRAJECTORY_FORMAT_VERSION {
            return Err(SimError::UnsupportedVersion(f.version));
        }
        if f.samples.windows(2).any(|w| w[1].t < w[0].t) {
            return Err(SimError::Parse("sample times must be non-decreasing".into()));
        }
        Ok(f)
    }
}
