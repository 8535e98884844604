use serde::{Deserialize, Serialize};

use super::{Polyline, Vec2};

/// Dashed connector from a deformed node back to its place on the graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tether {
    pub deformed: Vec2,
    pub original: Vec2,
}

/// Copy of a polyline pulled toward a point, ends pinned in place.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElasticCurve {
    pub points: Vec<Vec2>,
    /// Original arc length of every deformed point.
    pub source_arclens: Vec<f64>,
    /// Index into `points` of the pulled point.
    pub anchor_index: usize,
    pub tethers: Vec<Tether>,
}

impl ElasticCurve {
    pub fn anchor(&self) -> Vec2 {
        self.points[self.anchor_index]
    }

    pub fn polyline(&self) -> Polyline {
        Polyline::new(self.points.clone()).expect("elastic curve keeps at least two points")
    }

    /// Projects `p` onto the deformed curve and maps the hit back to an arc
    /// length on the source polyline, proportionally within the hit segment.
    pub fn source_arclen_of(&self, p: Vec2) -> f64 {
        let pl = self.polyline();
        let pr = pl.project(p);
        let i = pr.segment_index;
        let len = pl.segment_length(i);
        let t = if len > 0.0 { ((pr.arclen - pl.vertex_arclen(i)) / len).clamp(0.0, 1.0) } else { 0.0 };
        let (s0, s1) = (self.source_arclens[i], self.source_arclens[i + 1]);
        s0 + (s1 - s0) * t
    }
}

/// Weight of the pull at arc length `s`: 1 at the anchor, falling linearly
/// to 0 at both ends.
pub fn tent_weight(s: f64, anchor: f64, total: f64) -> f64 {
    if anchor <= 0.0 || anchor >= total {
        return 0.0;
    }
    if s <= anchor {
        (s / anchor).max(0.0)
    } else {
        ((total - s) / (total - anchor)).max(0.0)
    }
}

/// Pulls the point at `anchor_arclen` onto `gaze`, dragging the rest of the
/// curve along by the tent weight. Endpoints never move; an anchor sitting on
/// an endpoint therefore leaves the curve undeformed.
pub fn elastic_deform(source: &Polyline, gaze: Vec2, anchor_arclen: f64) -> ElasticCurve {
    let total = source.total_length();
    let anchor = anchor_arclen.clamp(0.0, total);
    let (anchor_pt, seg) = source.point_at(anchor);
    let offset = gaze - anchor_pt;
    let pinned = anchor <= 0.0 || anchor >= total;

    let src = source.points();
    let last = src.len() - 1;
    let deform = |k: usize| -> Vec2 {
        if k == 0 || k == last {
            return src[k];
        }
        let s = source.vertex_arclen(k);
        if s == anchor {
            return gaze;
        }
        src[k] + offset * tent_weight(s, anchor, total)
    };

    let mut points = Vec::with_capacity(src.len() + 1);
    let mut source_arclens = Vec::with_capacity(src.len() + 1);
    let mut anchor_index = None;
    for k in 0..=last {
        let s = source.vertex_arclen(k);
        points.push(deform(k));
        source_arclens.push(s);
        if s == anchor {
            anchor_index.get_or_insert(k);
        }
        if k == seg && anchor_index.is_none() && s < anchor && anchor < source.vertex_arclen(k + 1) {
            points.push(if pinned { anchor_pt } else { gaze });
            source_arclens.push(anchor);
            anchor_index = Some(points.len() - 1);
        }
    }

    let tethers = (0..=last).map(|k| Tether { deformed: deform(k), original: src[k] }).collect();

    ElasticCurve {
        points,
        source_arclens,
        anchor_index: anchor_index.expect("anchor lies on the source polyline"),
        tethers,
    }
}
