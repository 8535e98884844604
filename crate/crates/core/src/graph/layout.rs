use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Extent, Graph};
use crate::geometry::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayoutParams {
    pub iterations: usize,
    /// Target minimum node separation after fitting, meters.
    pub min_spacing: f64,
    /// Fraction of each extent dimension kept free on every side.
    pub margin: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams { iterations: 300, min_spacing: 0.09, margin: 0.05 }
    }
}

/// Fruchterman-Reingold placement for the topology of `g`.
pub fn layout_force_directed(g: &Graph, iterations: usize, seed: u64) -> Vec<Vec2> {
    let edges: Vec<(usize, usize)> =
        g.links().iter().map(|l| (g.node_index(l.a), g.node_index(l.b))).collect();
    let params = LayoutParams { iterations, ..LayoutParams::default() };
    force_layout(g.nodes().len(), &edges, g.extent(), &params, seed)
}

/// Places `n` nodes joined by `edges` (index pairs) inside `extent`.
pub fn force_layout(n: usize, edges: &[(usize, usize)], extent: Extent, params: &LayoutParams, seed: u64) -> Vec<Vec2> {
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c61_796f_7574);
    let mut pos: Vec<Vec2> = (0..n).map(|_| Vec2::new(rng.random(), rng.random())).collect();

    let k = (1.0 / n as f64).sqrt();
    let t0 = 0.1;
    let mut disp = vec![Vec2::ZERO; n];
    for it in 0..params.iterations {
        disp.iter_mut().for_each(|d| *d = Vec2::ZERO);
        for i in 0..n {
            for j in i + 1..n {
                let mut delta = pos[i] - pos[j];
                let mut d = delta.norm();
                if d < 1e-9 {
                    delta = Vec2::from_bearing((i * 37 + j * 11) as f64);
                    d = 1e-9;
                }
                let push = delta * (k * k / (d * d));
                disp[i] += push;
                disp[j] += -push;
            }
        }
        for &(a, b) in edges {
            let delta = pos[a] - pos[b];
            let pull = delta * (delta.norm() / k);
            disp[a] += -pull;
            disp[b] += pull;
        }
        let temp = t0 * (1.0 - it as f64 / params.iterations as f64);
        for i in 0..n {
            let d = disp[i].norm();
            if d > 0.0 {
                pos[i] += disp[i] * (d.min(temp) / d);
            }
        }
    }

    let mut pos = fit(&pos, extent, params.margin);
    separate(&mut pos, extent, params);
    pos
}

fn fit(pos: &[Vec2], extent: Extent, margin: f64) -> Vec<Vec2> {
    let (mut lo, mut hi) = (pos[0], pos[0]);
    for p in pos {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let (mx, my) = (extent.w * margin, extent.h * margin);
    let axis = |v: f64, lo: f64, hi: f64, m: f64, size: f64| {
        if hi - lo < 1e-12 {
            size / 2.0
        } else {
            m + (v - lo) / (hi - lo) * (size - 2.0 * m)
        }
    };
    pos.iter()
        .map(|p| Vec2::new(axis(p.x, lo.x, hi.x, mx, extent.w), axis(p.y, lo.y, hi.y, my, extent.h)))
        .collect()
}

fn separate(pos: &mut [Vec2], extent: Extent, params: &LayoutParams) {
    let (mx, my) = (extent.w * params.margin, extent.h * params.margin);
    let s = params.min_spacing;
    for _ in 0..500 {
        let mut moved = false;
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                let delta = pos[i] - pos[j];
                let d = delta.norm();
                if d >= s {
                    continue;
                }
                let dir = delta.normalized().unwrap_or_else(|| Vec2::from_bearing((i * 37 + j * 11) as f64));
                let shift = dir * ((s - d) / 2.0 + 1e-6);
                pos[i] += shift;
                pos[j] += -shift;
                moved = true;
            }
        }
        for p in pos.iter_mut() {
            p.x = p.x.clamp(mx, extent.w - mx);
            p.y = p.y.clamp(my, extent.h - my);
        }
        if !moved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXT: Extent = Extent { w: 2.0, h: 1.96 };

    #[test]
    fn single_node_is_centered() {
        let p = force_layout(1, &[], EXT, &LayoutParams::default(), 1);
        assert_eq!(p, vec![EXT.center()]);
    }

    #[test]
    fn pair_is_separated() {
        let p = force_layout(2, &[(0, 1)], EXT, &LayoutParams::default(), 9);
        assert!(p[0].distance(p[1]) >= LayoutParams::default().min_spacing);
    }

    #[test]
    fn deterministic_per_seed() {
        let e = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let a = force_layout(4, &e, EXT, &LayoutParams::default(), 5);
        let b = force_layout(4, &e, EXT, &LayoutParams::default(), 5);
        assert_eq!(a, b);
    }
}
