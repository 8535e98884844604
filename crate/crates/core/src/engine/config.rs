use serde::{Deserialize, Serialize};

use super::EngineError;

/// Tunables shared by all techniques. Distances in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TechniqueConfig {
    /// Radius of the magnetic area of influence, `R`.
    pub influence_radius: f64,
    /// Radius inside which competitors are reported, normally `2R`.
    pub candidate_radius: f64,
    /// Crossing resistance term `c1`.
    pub c1: f64,
    /// Discount on `c1` for the attached link, `c_a`.
    pub c_attached: f64,
    pub ray_cap: usize,
    pub node_hit_radius: f64,
    /// Rendered width of a weight-1 link; width scales with weight.
    pub link_base_width: f64,
    /// Extra hover slack beyond a link's half-width (BaseLine).
    pub hover_slack: f64,
}

impl Default for TechniqueConfig {
    fn default() -> Self {
        TechniqueConfig {
            influence_radius: 0.05,
            candidate_radius: 0.10,
            c1: 0.1,
            c_attached: 0.75,
            ray_cap: 5,
            node_hit_radius: 0.015,
            link_base_width: 0.004,
            hover_slack: 0.005,
        }
    }
}

impl TechniqueConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |what: &str| Err(EngineError::InvalidConfig(what.to_string()));
        if !(self.influence_radius > 0.0) {
            return bad("influence_radius must be > 0");
        }
        if !(self.candidate_radius >= self.influence_radius) {
            return bad("candidate_radius must be >= influence_radius");
        }
        if !(self.c_attached > 0.0 && self.c_attached < 1.0) {
            return bad("c_attached must lie in (0, 1)");
        }
        if !(self.c1 > 0.0) {
            return bad("c1 must be > 0");
        }
        if self.ray_cap < 1 {
            return bad("ray_cap must be >= 1");
        }
        if !(self.node_hit_radius > 0.0) {
            return bad("node_hit_radius must be > 0");
        }
        if !(self.link_base_width >= 0.0 && self.hover_slack >= 0.0) {
            return bad("link widths must be non-negative");
        }
        Ok(())
    }

    /// Hover distance for a link of weight `w`: half its width plus slack.
    pub fn hover_tolerance(&self, w: u32) -> f64 {
        self.link_base_width * f64::from(w) / 2.0 + self.hover_slack
    }
}
