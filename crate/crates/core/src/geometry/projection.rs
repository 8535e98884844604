use serde::{Deserialize, Serialize};

use super::{GeometryError, Vec2};

/// Closest point on a segment or polyline to a query point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub point: Vec2,
    /// Meters along the polyline from its first vertex.
    pub arclen: f64,
    /// Meters from the query point to `point`.
    pub distance: f64,
    pub segment_index: usize,
}

pub fn project_point_segment(p: Vec2, a: Vec2, b: Vec2) -> Result<Projection, GeometryError> {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return Err(GeometryError::DegenerateSegment);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    let point = if t == 1.0 { b } else { a + ab * t };
    Ok(Projection {
        point,
        arclen: t * ab.norm(),
        distance: p.distance(point),
        segment_index: 0,
    })
}

/// Projects onto a raw point list. Returns `None` for fewer than two points.
pub fn project_point_polyline(p: Vec2, points: &[Vec2]) -> Option<Projection> {
    Polyline::new(points.to_vec()).ok().map(|pl| pl.project(p))
}

/// An open polyline with cached cumulative arc lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    points: Vec<Vec2>,
    cumulative: Vec<f64>,
}

impl Polyline {
    pub fn new(points: Vec<Vec2>) -> Result<Self, GeometryError> {
        if points.len() < 2 {
            return Err(GeometryError::TooFewPoints(points.len()));
        }
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in points.windows(2) {
            acc += w[0].distance(w[1]);
            cumulative.push(acc);
        }
        Ok(Polyline { points, cumulative })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn first(&self) -> Vec2 {
        self.points[0]
    }

    pub fn last(&self) -> Vec2 {
        self.points[self.points.len() - 1]
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn total_length(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Arc length of vertex `i`.
    pub fn vertex_arclen(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        self.cumulative[i + 1] - self.cumulative[i]
    }

    /// Global nearest point; ties go to the smaller arc length.
    pub fn project(&self, p: Vec2) -> Projection {
        let mut best: Option<Projection> = None;
        for (i, w) in self.points.windows(2).enumerate() {
            let cand = match project_point_segment(p, w[0], w[1]) {
                Ok(mut pr) => {
                    pr.segment_index = i;
                    pr.arclen = if pr.point == w[1] {
                        self.cumulative[i + 1]
                    } else {
                        self.cumulative[i] + pr.arclen
                    };
                    pr
                }
                // zero-length segment: behaves like its vertex
                Err(_) => Projection {
                    point: w[0],
                    arclen: self.cumulative[i],
                    distance: p.distance(w[0]),
                    segment_index: i,
                },
            };
            match &best {
                Some(b) if cand.distance >= b.distance - 1e-12 => {}
                _ => best = Some(cand),
            }
        }
        best.expect("polyline has at least one segment")
    }

    /// Point at arc length `s` (clamped), with its segment index.
    pub fn point_at(&self, s: f64) -> (Vec2, usize) {
        let total = self.total_length();
        if s <= 0.0 {
            return (self.points[0], 0);
        }
        if s >= total {
            let n = self.segment_count();
            return (self.last(), n - 1);
        }
        let i = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).expect("finite arc lengths"))
        {
            Ok(i) => return (self.points[i], i.min(self.segment_count() - 1)),
            Err(i) => i - 1,
        };
        let len = self.segment_length(i);
        let t = if len > 0.0 { (s - self.cumulative[i]) / len } else { 0.0 };
        (self.points[i].lerp(self.points[i + 1], t), i)
    }
}
