use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, LinkId, NodeId};
use crate::geometry::Vec2;

const PATH_ATTEMPTS: u32 = 5000;

/// Weight applied to task-path links in weighted trials.
pub const PATH_WEIGHT: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Weighted,
    Homogeneous,
}

impl PathKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathKind::Weighted => "weighted",
            PathKind::Homogeneous => "homogeneous",
        }
    }
}

impl std::str::FromStr for PathKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weighted" => Ok(PathKind::Weighted),
            "homogeneous" => Ok(PathKind::Homogeneous),
            _ => Err(format!("unknown path kind `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathElement {
    Node(NodeId),
    Link(LinkId),
}

/// Ordered simple path: `nodes[i]` and `nodes[i + 1]` are joined by `links[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPath {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
}

impl TaskPath {
    /// Validates adjacency and simplicity against `g`.
    pub fn new(g: &Graph, nodes: Vec<NodeId>) -> Result<TaskPath, GraphError> {
        if nodes.len() < 2 {
            return Err(GraphError::InvalidPath("fewer than two nodes".into()));
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != nodes.len() {
            return Err(GraphError::InvalidPath("repeated node".into()));
        }
        let mut links = Vec::with_capacity(nodes.len() - 1);
        for w in nodes.windows(2) {
            g.node(w[0])?;
            g.node(w[1])?;
            let l = g
                .link_between(w[0], w[1])
                .ok_or_else(|| GraphError::InvalidPath(format!("{} and {} are not adjacent", w[0], w[1])))?;
            links.push(l);
        }
        Ok(TaskPath { nodes, links })
    }

    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    /// Alternating node, link, node, ... sequence.
    pub fn elements(&self) -> Vec<PathElement> {
        let mut out = Vec::with_capacity(self.nodes.len() + self.links.len());
        for (i, &n) in self.nodes.iter().enumerate() {
            out.push(PathElement::Node(n));
            if let Some(&l) = self.links.get(i) {
                out.push(PathElement::Link(l));
            }
        }
        out
    }

    pub fn length(&self, g: &Graph) -> f64 {
        self.links.iter().map(|&l| g.link_length(l)).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathRequest {
    pub length: usize,
    pub kind: PathKind,
    /// At least one path link at or above the 75th percentile link length.
    pub require_long_link: bool,
    /// Reject paths whose links cross any other graph link.
    pub avoid_crossings: bool,
    pub seed: u64,
}

impl PathRequest {
    pub fn new(kind: PathKind, seed: u64) -> Self {
        PathRequest { length: 7, kind, require_long_link: false, avoid_crossings: false, seed }
    }
}

/// Nearest-rank percentile of all link lengths, `q` in `[0, 1]`.
pub fn link_length_percentile(g: &Graph, q: f64) -> f64 {
    let mut lens: Vec<f64> = g.links().iter().map(|l| g.link_length(l.id)).collect();
    if lens.is_empty() {
        return 0.0;
    }
    lens.sort_by(|a, b| a.partial_cmp(b).expect("finite lengths"));
    let rank = ((q * lens.len() as f64).ceil() as usize).clamp(1, lens.len());
    lens[rank - 1]
}

fn segments_cross(p: Vec2, q: Vec2, r: Vec2, s: Vec2) -> bool {
    let orient = |a: Vec2, b: Vec2, c: Vec2| (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let (d1, d2) = (orient(p, q, r), orient(p, q, s));
    let (d3, d4) = (orient(r, s, p), orient(r, s, q));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Proper crossing of two links that share no endpoint.
pub fn links_cross(g: &Graph, a: LinkId, b: LinkId) -> bool {
    let (la, lb) = (g.link(a).expect("known link"), g.link(b).expect("known link"));
    if la.touches(lb.a) || la.touches(lb.b) {
        return false;
    }
    let (p, q) = g.endpoints(a);
    let (r, s) = g.endpoints(b);
    segments_cross(p, q, r, s)
}

fn crosses_anything(g: &Graph, l: LinkId) -> bool {
    g.links().iter().any(|o| o.id != l && links_cross(g, l, o.id))
}

fn random_simple_path(g: &Graph, len: usize, rng: &mut ChaCha8Rng) -> Option<Vec<NodeId>> {
    let start = g.nodes()[rng.random_range(0..g.nodes().len())].id;
    let mut path = vec![start];
    let mut budget = 200;
    extend(g, &mut path, len, rng, &mut budget).then_some(path)
}

fn extend(g: &Graph, path: &mut Vec<NodeId>, len: usize, rng: &mut ChaCha8Rng, budget: &mut u32) -> bool {
    if path.len() == len + 1 {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let tail = *path.last().unwrap();
    let mut next: Vec<NodeId> = g
        .incident(tail)
        .expect("path nodes exist")
        .iter()
        .map(|&l| g.link(l).expect("incident link").other(tail))
        .filter(|n| !path.contains(n))
        .collect();
    next.shuffle(rng);
    for n in next {
        path.push(n);
        if extend(g, path, len, rng, budget) {
            return true;
        }
        path.pop();
    }
    false
}

/// Samples a simple task path and returns it with the graph reweighted for
/// `req.kind`: path links at weight 3 and all others at 1 for weighted
/// trials, every link at 1 for homogeneous ones.
pub fn sample_task_path(g: &Graph, req: &PathRequest) -> Result<(TaskPath, Graph), GraphError> {
    if req.length == 0 || g.nodes().len() < req.length + 1 {
        return Err(GraphError::InvalidParameters(format!("cannot host a {}-link path", req.length)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let long = link_length_percentile(g, 0.75);
    for _ in 0..PATH_ATTEMPTS {
        let Some(nodes) = random_simple_path(g, req.length, &mut rng) else { continue };
        let path = TaskPath::new(g, nodes)?;
        if req.require_long_link && !path.links.iter().any(|&l| g.link_length(l) >= long) {
            continue;
        }
        if req.avoid_crossings && path.links.iter().any(|&l| crosses_anything(g, l)) {
            continue;
        }
        let reweighted = match req.kind {
            PathKind::Weighted => {
                g.with_weights(|l| if path.links.contains(&l.id) { PATH_WEIGHT } else { 1 })?
            }
            PathKind::Homogeneous => g.with_weights(|_| 1)?,
        };
        return Ok((path, reweighted));
    }
    Err(GraphError::NoPath { attempts: PATH_ATTEMPTS })
}
