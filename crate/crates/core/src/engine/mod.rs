//! Per-technique state machines.
//!
//! [`step`] is a pure function of the previous [`EngineState`], one
//! [`GazeSample`], the graph and the configuration. It returns the next state,
//! the overlay primitives to draw, and the discrete events of that step.

mod config;
mod frame;
mod magnetic;
mod sliding;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use config::TechniqueConfig;
pub use frame::{ElasticOverlay, EngineEvent, OverlayFrame, Ray, Target};
pub use magnetic::{distance_from_max_weight, elastic_fade, magnetic_retarget, magnetic_value, Retarget};
pub use sliding::{node_fan, sliding_choose_link, NodeVisit};

use crate::geometry::{SliceSet, Vec2};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("unknown technique `{0}`")]
    UnknownTechnique(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("start hint {0} is not a graph node")]
    UnknownStart(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Technique {
    BaseLine,
    SlidingRing,
    SlidingElastic,
    MagneticArea,
    MagneticElastic,
}

impl Technique {
    pub const ALL: [Technique; 5] = [
        Technique::BaseLine,
        Technique::SlidingRing,
        Technique::SlidingElastic,
        Technique::MagneticArea,
        Technique::MagneticElastic,
    ];

    pub fn is_sliding(self) -> bool {
        matches!(self, Technique::SlidingRing | Technique::SlidingElastic)
    }

    pub fn is_magnetic(self) -> bool {
        matches!(self, Technique::MagneticArea | Technique::MagneticElastic)
    }

    pub fn is_elastic(self) -> bool {
        matches!(self, Technique::SlidingElastic | Technique::MagneticElastic)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::BaseLine => "BaseLine",
            Technique::SlidingRing => "SlidingRing",
            Technique::SlidingElastic => "SlidingElastic",
            Technique::MagneticArea => "MagneticArea",
            Technique::MagneticElastic => "MagneticElastic",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Technique::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| EngineError::UnknownTechnique(s.to_string()))
    }
}

/// One gaze-cursor position on the display plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub t: f64,
    pub pos: Vec2,
}

impl GazeSample {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        GazeSample { t, pos: Vec2::new(x, y) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineState {
    pub technique: Technique,
    pub start_hint: Option<NodeId>,
    pub attachment: Option<Target>,
    /// Ring position along the attached subpath (sliding only).
    pub ring_arclen: f64,
    /// Node currently being visited by the gaze, with its slices.
    pub in_node: Option<NodeVisit>,
    pub last_gaze: Option<GazeSample>,
    pub last_frame: Option<OverlayFrame>,
}

impl EngineState {
    pub fn slices(&self) -> Option<&SliceSet> {
        self.in_node.as_ref().map(|v| &v.slices)
    }
}

pub struct StepOutput {
    pub state: EngineState,
    pub frame: OverlayFrame,
    pub events: Vec<EngineEvent>,
}

/// Fresh, unattached state. Sliding techniques attach on their first
/// contact with the graph.
pub fn init(
    technique: Technique,
    graph: &Graph,
    config: &TechniqueConfig,
    start_hint: Option<NodeId>,
) -> Result<EngineState, EngineError> {
    config.validate()?;
    if let Some(n) = start_hint {
        if !graph.has_node(n) {
            return Err(EngineError::UnknownStart(n));
        }
    }
    Ok(EngineState {
        technique,
        start_hint,
        attachment: None,
        ring_arclen: 0.0,
        in_node: None,
        last_gaze: None,
        last_frame: None,
    })
}

pub fn step(state: &EngineState, sample: GazeSample, graph: &Graph, config: &TechniqueConfig) -> StepOutput {
    let (mut next, frame, events) = match state.technique {
        Technique::BaseLine => baseline_step(state, sample, graph, config),
        Technique::SlidingRing | Technique::SlidingElastic => sliding::sliding_step(state, sample, graph, config),
        Technique::MagneticArea | Technique::MagneticElastic => magnetic::magnetic_step(state, sample, graph, config),
    };
    next.last_gaze = Some(sample);
    next.last_frame = Some(frame.clone());
    StepOutput { state: next, frame, events }
}

fn baseline_step(
    state: &EngineState,
    sample: GazeSample,
    graph: &Graph,
    config: &TechniqueConfig,
) -> (EngineState, OverlayFrame, Vec<EngineEvent>) {
    let gaze = sample.pos;
    let mut events = node_events(graph, gaze, config);
    events.extend(hovered_links(graph, gaze, config).into_iter().map(|(link, projection)| {
        EngineEvent::CursorOverLink { link, projection }
    }));
    (state.clone(), OverlayFrame::echo(sample.t, gaze), events)
}

fn node_events(graph: &Graph, p: Vec2, config: &TechniqueConfig) -> Vec<EngineEvent> {
    graph
        .nodes_within(p, config.node_hit_radius)
        .into_iter()
        .map(|node| EngineEvent::CursorOverNode { node })
        .collect()
}

/// Links within hover tolerance of `p`, nearest first, ties by id.
pub(crate) fn hovered_links(
    graph: &Graph,
    p: Vec2,
    config: &TechniqueConfig,
) -> Vec<(crate::graph::LinkId, crate::geometry::Projection)> {
    let reach = config.hover_tolerance(graph.max_weight());
    let mut hits: Vec<_> = graph
        .links_within(p, reach)
        .into_iter()
        .filter(|(l, pr)| pr.distance <= config.hover_tolerance(graph.link(*l).expect("listed link").weight))
        .collect();
    hits.sort_by(|a, b| a.1.distance.partial_cmp(&b.1.distance).expect("finite").then(a.0.cmp(&b.0)));
    hits
}
