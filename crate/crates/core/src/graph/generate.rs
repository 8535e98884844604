use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::{force_layout, LayoutParams};
use super::{Extent, Graph, GraphError, Link, LinkId, Node, NodeId};

const CONNECT_ATTEMPTS: u32 = 100;

/// Default interaction region of the shared display, in meters.
pub const DEFAULT_EXTENT: Extent = Extent { w: 2.0, h: 1.96 };

/// Edges of the ring lattice where each node links to its `k / 2` nearest
/// neighbours on either side.
pub fn ring_lattice(n: usize, k: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(n * k / 2);
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges.sort_unstable();
    edges
}

fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for (u, v) in ring_lattice(n, k) {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.random::<f64>() >= p {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    adj
}

fn connected(adj: &[BTreeSet<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Connected Watts-Strogatz small world, laid out by force direction over
/// the default display region.
pub fn generate_small_world(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if k < 2 || k % 2 != 0 || n <= k {
        return Err(GraphError::InvalidParameters(format!("need n > k >= 2 with k even, got n={n} k={k}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameters(format!("rewire probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CONNECT_ATTEMPTS {
        let adj = watts_strogatz(n, k, p, &mut rng);
        if !connected(&adj) {
            continue;
        }
        let edges: Vec<(usize, usize)> = adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect();
        let pos = force_layout(n, &edges, DEFAULT_EXTENT, &LayoutParams::default(), seed);
        let nodes = (0..n).map(|i| Node { id: NodeId(i as u32), pos: pos[i] }).collect();
        let links = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Link { id: LinkId(i as u32), a: NodeId(a as u32), b: NodeId(b as u32), weight: 1 })
            .collect();
        return Graph::new(DEFAULT_EXTENT, nodes, links);
    }
    Err(GraphError::NotConnected { attempts: CONNECT_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        let e = ring_lattice(10, 4);
        assert_eq!(e.len(), 20);
    }

    #[test]
    fn zero_rewiring_is_the_lattice() {
        let g = generate_small_world(30, 4, 0.0, 3).unwrap();
        assert!(g.nodes().iter().all(|n| g.degree(n.id).unwrap() == 4));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_small_world(4, 4, 0.1, 0).is_err());
        assert!(generate_small_world(10, 3, 0.1, 0).is_err());
        assert!(generate_small_world(10, 0, 0.1, 0).is_err());
        assert!(generate_small_world(10, 2, 1.5, 0).is_err());
    }
}
