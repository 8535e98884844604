use serde::{Deserialize, Serialize};

use crate::geometry::{ElasticCurve, Projection, Vec2};
use crate::graph::{LinkId, NodeId, SubpathId};

/// What a technique is currently holding on to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum Target {
    Link(LinkId),
    Subpath(SubpathId),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EngineEvent {
    Attached { target: Target },
    Detached,
    RingAtNode { node: NodeId },
    SliceCommitted { link: LinkId },
    /// The technique's active cursor point is within the node hit radius.
    CursorOverNode { node: NodeId },
    /// The active cursor is over `link`; `projection` locates it.
    CursorOverLink { link: LinkId, projection: Projection },
}

/// Feed-forward line toward a competing link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub link: LinkId,
    pub attach: Vec2,
    /// 1 at the detachment boundary, falling toward 0 for weak competitors.
    pub intensity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElasticOverlay {
    pub subpath: SubpathId,
    pub curve: ElasticCurve,
    pub alpha: f64,
}

/// Render primitives for one gaze sample. Graph-anchored endpoints (ring,
/// rope end, ray attach points, tether originals) lie on graph geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlayFrame {
    pub t: f64,
    pub gaze: Vec2,
    /// Point the task harness scores: gaze, ring, or attachment point.
    pub tracer: Vec2,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring: Option<Vec2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trail: Option<[Vec2; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elastic: Option<ElasticOverlay>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rope: Option<[Vec2; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub rays: Vec<Ray>,
}

impl OverlayFrame {
    pub fn echo(t: f64, gaze: Vec2) -> Self {
        OverlayFrame { t, gaze, tracer: gaze, ring: None, trail: None, elastic: None, rope: None, rays: Vec::new() }
    }
}
