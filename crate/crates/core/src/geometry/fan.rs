//! Angular link fanning around a node.
//!
//! Each incident link receives as many proxies as its weight. The proxies are
//! spaced evenly around a circle, grouped in blocks that follow the circular
//! order of the original link bearings, and the whole circle is then rotated
//! so the proxies sit as close as possible to their parent links. Each proxy
//! owns a slice of width `360 / proxies` centered on it; a link's zone is the
//! union of its proxies' slices.
//!
//! All angles are in degrees. Zones are half-open `(lo, hi]`.

use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Wraps an angle into `(-180, 180]`.
pub fn wrap_deg(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Smallest absolute angular difference, in `[0, 180]`.
pub fn angle_between(a: f64, b: f64) -> f64 {
    wrap_deg(a - b).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proxy {
    /// Index of the parent link in the caller's input order.
    pub link: usize,
    pub angle: f64,
}

/// Angular zone owned by one link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub link: usize,
    pub lo: f64,
    pub width: f64,
}

impl Zone {
    pub fn hi(&self) -> f64 {
        self.lo + self.width
    }

    pub fn contains(&self, bearing: f64) -> bool {
        if self.width >= 360.0 {
            return true;
        }
        let d = (bearing - self.lo).rem_euclid(360.0);
        d > 0.0 && d <= self.width
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSet {
    /// Rotation applied to the evenly spaced base offsets.
    pub rotation: f64,
    pub proxies: Vec<Proxy>,
    /// One zone per input link, indexed like the input.
    pub zones: Vec<Zone>,
}

impl SliceSet {
    pub fn zone(&self, link: usize) -> &Zone {
        &self.zones[link]
    }

    /// Index of the link whose zone contains `bearing`.
    pub fn link_at(&self, bearing: f64) -> usize {
        if let Some(z) = self.zones.iter().find(|z| z.contains(bearing)) {
            return z.link;
        }
        // rounding gap at a boundary: nearest upper edge wins
        self.zones
            .iter()
            .min_by(|a, b| {
                angle_between(a.hi(), bearing)
                    .partial_cmp(&angle_between(b.hi(), bearing))
                    .expect("finite angles")
            })
            .map(|z| z.link)
            .expect("slice set is never empty")
    }
}

/// Lays out weighted proxies for links at `angles` and returns their zones.
///
/// Ties in bearing are broken by input index, so callers should pass links in
/// id order.
pub fn fan_slices(angles: &[f64], weights: &[u32]) -> Result<SliceSet, GeometryError> {
    if angles.is_empty() {
        return Err(GeometryError::EmptyFan);
    }
    if angles.len() != weights.len() {
        return Err(GeometryError::LengthMismatch { angles: angles.len(), weights: weights.len() });
    }
    if let Some(i) = weights.iter().position(|&w| w == 0) {
        return Err(GeometryError::ZeroWeight(i));
    }

    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&i, &j| {
        angles[i]
            .rem_euclid(360.0)
            .partial_cmp(&angles[j].rem_euclid(360.0))
            .expect("finite angles")
            .then(i.cmp(&j))
    });

    let total: u32 = weights.iter().sum();
    let step = 360.0 / f64::from(total);

    // parent link of each base slot, in circular order
    let mut parents = Vec::with_capacity(total as usize);
    for &i in &order {
        parents.extend(std::iter::repeat_n(i, weights[i] as usize));
    }

    let (mut s, mut c) = (0.0, 0.0);
    for (j, &i) in parents.iter().enumerate() {
        let d = (angles[i] - j as f64 * step).to_radians();
        s += d.sin();
        c += d.cos();
    }
    let rotation = s.atan2(c).to_degrees();

    let proxies = parents
        .iter()
        .enumerate()
        .map(|(j, &i)| Proxy { link: i, angle: wrap_deg(rotation + j as f64 * step) })
        .collect();

    let half = step / 2.0;
    let mut zones = vec![Zone { link: 0, lo: 0.0, width: 0.0 }; angles.len()];
    let mut start = 0u32;
    for &i in &order {
        zones[i] = Zone {
            link: i,
            lo: wrap_deg(rotation + f64::from(start) * step - half),
            width: f64::from(weights[i]) * step,
        };
        start += weights[i];
    }

    Ok(SliceSet { rotation, proxies, zones })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perpendicular_pair() {
        let s = fan_slices(&[0.0, 90.0], &[1, 1]).unwrap();
        assert!((s.rotation + 45.0).abs() < 1e-9);
        assert!((s.zones[0].lo + 135.0).abs() < 1e-9);
        assert!((s.zones[0].hi() - 45.0).abs() < 1e-9);
        assert!((s.zones[1].lo - 45.0).abs() < 1e-9);
        assert!((s.zones[1].hi() - 225.0).abs() < 1e-9);
        assert_eq!(s.link_at(10.0), 0);
        assert_eq!(s.link_at(100.0), 1);
        // half-open: the upper edge belongs to the zone
        assert_eq!(s.link_at(45.0 - 1e-9), 0);
    }

    #[test]
    fn weighted_link_takes_three_quarters() {
        let s = fan_slices(&[0.0, 180.0], &[3, 1]).unwrap();
        let angles: Vec<f64> = s.proxies.iter().map(|p| p.angle).collect();
        for (got, want) in angles.iter().zip([-90.0, 0.0, 90.0, 180.0]) {
            assert!((got - want).abs() < 1e-9, "{angles:?}");
        }
        assert!((s.zones[0].width - 270.0).abs() < 1e-9);
        assert!((s.zones[1].width - 90.0).abs() < 1e-9);
    }

    #[test]
    fn single_link_owns_the_circle() {
        let s = fan_slices(&[37.0], &[1]).unwrap();
        assert_eq!(s.zones[0].width, 360.0);
        for b in [-179.0, 0.0, 37.0, 180.0] {
            assert_eq!(s.link_at(b), 0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(fan_slices(&[], &[]), Err(GeometryError::EmptyFan));
        assert_eq!(fan_slices(&[0.0], &[0]), Err(GeometryError::ZeroWeight(0)));
        assert!(fan_slices(&[0.0, 1.0], &[1]).is_err());
    }

    #[test]
    fn wrap() {
        assert_eq!(wrap_deg(540.0), 180.0);
        assert_eq!(wrap_deg(-180.0), 180.0);
        assert_eq!(wrap_deg(-190.0), 170.0);
        assert_eq!(angle_between(350.0, 10.0), 20.0);
    }
}
