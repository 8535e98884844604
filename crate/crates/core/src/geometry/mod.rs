//! Planar geometry beneath the navigation techniques: projections onto
//! segments and polylines, weighted angular fanning, and elastic deformation.

mod elastic;
mod fan;
mod point;
mod projection;

pub use elastic::{elastic_deform, tent_weight, ElasticCurve, Tether};
pub use fan::{angle_between, fan_slices, wrap_deg, Proxy, SliceSet, Zone};
pub use point::Vec2;
pub use projection::{project_point_polyline, project_point_segment, Polyline, Projection};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,
    #[error("polyline needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("fan needs at least one link")]
    EmptyFan,
    #[error("{angles} angles but {weights} weights")]
    LengthMismatch { angles: usize, weights: usize },
    #[error("link {0} has weight 0")]
    ZeroWeight(usize),
}
