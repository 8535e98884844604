use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::grid::LinkGrid;
use super::subpath::{partition_subpaths, Subpath};
use super::GraphError;
use crate::geometry::{project_point_segment, Projection, Vec2};

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident, $tag:literal) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($tag, "{}"), self.0)
            }
        }
    };
}

id_type!(NodeId, "n");
id_type!(LinkId, "l");
id_type!(
    /// Index of a maximal branch-free chain in [`Graph::subpaths`].
    SubpathId,
    "s"
);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub w: f64,
    pub h: f64,
}

impl Extent {
    pub fn contains(&self, p: Vec2) -> bool {
        (0.0..=self.w).contains(&p.x) && (0.0..=self.h).contains(&p.y)
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(self.w / 2.0, self.h / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub pos: Vec2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub a: NodeId,
    pub b: NodeId,
    pub weight: u32,
}

impl Link {
    pub fn other(&self, n: NodeId) -> NodeId {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.a == n || self.b == n
    }
}

/// An immutable, validated node-link graph laid out on the display plane.
///
/// Construction precomputes adjacency, the subpath partition and a link
/// spatial index, so a graph can be shared freely between trial runs.
#[derive(Clone, Debug)]
pub struct Graph {
    extent: Extent,
    nodes: Vec<Node>,
    links: Vec<Link>,
    node_ix: HashMap<NodeId, usize>,
    link_ix: HashMap<LinkId, usize>,
    incident: Vec<Vec<LinkId>>,
    subpaths: Vec<Subpath>,
    link_subpath: Vec<SubpathId>,
    grid: LinkGrid,
    w_max: u32,
}

impl Graph {
    pub fn new(extent: Extent, mut nodes: Vec<Node>, mut links: Vec<Link>) -> Result<Graph, GraphError> {
        if !(extent.w > 0.0 && extent.h > 0.0 && extent.w.is_finite() && extent.h.is_finite()) {
            return Err(GraphError::BadExtent { w: extent.w, h: extent.h });
        }
        let mut node_ix = HashMap::with_capacity(nodes.len());
        for (index, n) in nodes.iter().enumerate() {
            if node_ix.insert(n.id, index).is_some() {
                return Err(GraphError::DuplicateNode { index, id: n.id });
            }
            if !n.pos.is_finite() {
                return Err(GraphError::NonFinite { index, id: n.id });
            }
            if !extent.contains(n.pos) {
                return Err(GraphError::OutOfExtent { index, id: n.id });
            }
        }
        let mut seen_links = HashSet::with_capacity(links.len());
        let mut pairs = HashMap::with_capacity(links.len());
        for (index, l) in links.iter().enumerate() {
            if !seen_links.insert(l.id) {
                return Err(GraphError::DuplicateLink { index, id: l.id });
            }
            for end in [l.a, l.b] {
                if !node_ix.contains_key(&end) {
                    return Err(GraphError::DanglingEndpoint { index, id: l.id, node: end });
                }
            }
            if l.weight < 1 {
                return Err(GraphError::BadWeight { index, id: l.id, weight: l.weight });
            }
            if l.a == l.b {
                return Err(GraphError::SelfLoop { index, id: l.id });
            }
            let key = if l.a < l.b { (l.a, l.b) } else { (l.b, l.a) };
            if let Some(other) = pairs.insert(key, l.id) {
                return Err(GraphError::ParallelLink { index, id: l.id, other });
            }
            if nodes[node_ix[&l.a]].pos == nodes[node_ix[&l.b]].pos {
                return Err(GraphError::ZeroLength { index, id: l.id });
            }
        }

        nodes.sort_by_key(|n| n.id);
        links.sort_by_key(|l| l.id);
        let node_ix: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let link_ix: HashMap<LinkId, usize> = links.iter().enumerate().map(|(i, l)| (l.id, i)).collect();
        let mut incident = vec![Vec::new(); nodes.len()];
        for l in &links {
            incident[node_ix[&l.a]].push(l.id);
            incident[node_ix[&l.b]].push(l.id);
        }
        let w_max = links.iter().map(|l| l.weight).max().unwrap_or(1);

        let mut g = Graph {
            extent,
            nodes,
            links,
            node_ix,
            link_ix,
            incident,
            subpaths: Vec::new(),
            link_subpath: Vec::new(),
            grid: LinkGrid::default(),
            w_max,
        };
        let (subpaths, link_subpath) = partition_subpaths(&g);
        g.subpaths = subpaths;
        g.link_subpath = link_subpath;
        g.grid = LinkGrid::build(&g);
        Ok(g)
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Links in ascending id order.
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, GraphError> {
        self.node_ix.get(&id).map(|&i| &self.nodes[i]).ok_or(GraphError::UnknownNode(id))
    }

    pub fn link(&self, id: LinkId) -> Result<&Link, GraphError> {
        self.link_ix.get(&id).map(|&i| &self.links[i]).ok_or(GraphError::UnknownLink(id))
    }

    pub fn has_node(&self, id: NodeId) -> bool {
        self.node_ix.contains_key(&id)
    }

    pub(crate) fn node_index(&self, id: NodeId) -> usize {
        self.node_ix[&id]
    }

    pub(crate) fn link_index(&self, id: LinkId) -> usize {
        self.link_ix[&id]
    }

    pub fn pos(&self, id: NodeId) -> Vec2 {
        self.nodes[self.node_ix[&id]].pos
    }

    /// Links touching `id`, ascending by link id.
    pub fn incident(&self, id: NodeId) -> Result<&[LinkId], GraphError> {
        self.node_ix.get(&id).map(|&i| self.incident[i].as_slice()).ok_or(GraphError::UnknownNode(id))
    }

    pub fn degree(&self, id: NodeId) -> Result<usize, GraphError> {
        self.incident(id).map(<[LinkId]>::len)
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        let inc = self.incident(a).ok()?;
        inc.iter().copied().find(|&l| self.links[self.link_ix[&l]].touches(b))
    }

    pub fn endpoints(&self, id: LinkId) -> (Vec2, Vec2) {
        let l = &self.links[self.link_ix[&id]];
        (self.pos(l.a), self.pos(l.b))
    }

    pub fn link_length(&self, id: LinkId) -> f64 {
        let (a, b) = self.endpoints(id);
        a.distance(b)
    }

    /// Projection onto a link, arc length measured from its `a` end.
    pub fn project_on_link(&self, id: LinkId, p: Vec2) -> Projection {
        let (a, b) = self.endpoints(id);
        project_point_segment(p, a, b).expect("graph links have nonzero length")
    }

    /// Largest link weight, `w_max`.
    pub fn max_weight(&self) -> u32 {
        self.w_max
    }

    pub fn subpaths(&self) -> &[Subpath] {
        &self.subpaths
    }

    pub fn subpath(&self, id: SubpathId) -> &Subpath {
        &self.subpaths[id.0 as usize]
    }

    pub fn subpath_of(&self, link: LinkId) -> Result<SubpathId, GraphError> {
        self.link_ix.get(&link).map(|&i| self.link_subpath[i]).ok_or(GraphError::UnknownLink(link))
    }

    /// Links whose distance to `p` is at most `r`, with their projections,
    /// sorted by link id.
    pub fn links_within(&self, p: Vec2, r: f64) -> Vec<(LinkId, Projection)> {
        self.grid
            .candidates(p, r)
            .into_iter()
            .filter_map(|l| {
                let pr = self.project_on_link(l, p);
                (pr.distance <= r).then_some((l, pr))
            })
            .collect()
    }

    /// Nodes within `r` of `p`, sorted by id.
    pub fn nodes_within(&self, p: Vec2, r: f64) -> Vec<NodeId> {
        self.nodes.iter().filter(|n| n.pos.distance(p) <= r).map(|n| n.id).collect()
    }

    /// Copy of this graph with every link weight replaced by `weight(link)`.
    pub fn with_weights(&self, weight: impl Fn(&Link) -> u32) -> Result<Graph, GraphError> {
        let links = self.links.iter().map(|l| Link { weight: weight(l), ..*l }).collect();
        Graph::new(self.extent, self.nodes.clone(), links)
    }

    /// Geometric distance from `from` to every node along links, indexed
    /// like [`Graph::nodes`], with each node's predecessor on a shortest
    /// route.
    pub fn distances_from(&self, from: NodeId) -> Result<(Vec<f64>, Vec<Option<NodeId>>), GraphError> {
        let src = *self.node_ix.get(&from).ok_or(GraphError::UnknownNode(from))?;
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![None; n];
        let mut done = vec![false; n];
        dist[src] = 0.0;
        for _ in 0..n {
            let Some(i) = (0..n).filter(|&i| !done[i] && dist[i].is_finite()).min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            else {
                break;
            };
            done[i] = true;
            let here = self.nodes[i].id;
            for &l in &self.incident[i] {
                let j = self.node_ix[&self.links[self.link_ix[&l]].other(here)];
                let d = dist[i] + self.link_length(l);
                if d < dist[j] {
                    dist[j] = d;
                    prev[j] = Some(here);
                }
            }
        }
        Ok((dist, prev))
    }

    /// Nodes of a shortest route from `from` to `to`, both included.
    pub fn shortest_route(&self, from: NodeId, to: NodeId) -> Result<Option<Vec<NodeId>>, GraphError> {
        let (_, prev) = self.distances_from(to)?;
        if !self.has_node(from) {
            return Err(GraphError::UnknownNode(from));
        }
        let mut out = vec![from];
        let mut at = from;
        while at != to {
            match prev[self.node_index(at)] {
                Some(p) => at = p,
                None => return Ok(None),
            }
            out.push(at);
        }
        Ok(Some(out))
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &l in &self.incident[i] {
                let j = self.node_ix[&self.links[self.link_ix[&l]].other(self.nodes[i].id)];
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.nodes.len()
    }
}
