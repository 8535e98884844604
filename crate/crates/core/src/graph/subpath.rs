use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, LinkId, NodeId, SubpathId};
use crate::geometry::{Polyline, Vec2};

/// Maximal chain of links whose interior nodes all have degree 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subpath {
    pub id: SubpathId,
    pub links: Vec<LinkId>,
    pub nodes: Vec<NodeId>,
    pub polyline: Polyline,
}

impl Subpath {
    pub fn total_length(&self) -> f64 {
        self.polyline.total_length()
    }

    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn end(&self) -> NodeId {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn contains_link(&self, l: LinkId) -> bool {
        self.links.contains(&l)
    }

    /// Arc length of the `i`-th node along the chain.
    pub fn node_arclen(&self, i: usize) -> f64 {
        self.polyline.vertex_arclen(i)
    }

    /// Link incident to endpoint `node`, or `None` if `node` is not an end.
    pub fn end_link(&self, node: NodeId) -> Option<LinkId> {
        if node == self.start() {
            Some(self.links[0])
        } else if node == self.end() {
            Some(self.links[self.links.len() - 1])
        } else {
            None
        }
    }

    /// Arc length of an endpoint; the start wins for closed chains.
    pub fn end_arclen(&self, node: NodeId) -> Option<f64> {
        if node == self.start() {
            Some(0.0)
        } else if node == self.end() {
            Some(self.total_length())
        } else {
            None
        }
    }
}

/// Returns the maximal subpath containing `link`, oriented so that the lower
/// endpoint id comes first.
pub fn extract_subpath(g: &Graph, link: LinkId) -> Result<Subpath, GraphError> {
    let (links, nodes) = chain(g, link)?;
    let id = g.subpath_of(link)?;
    Ok(build(g, id, links, nodes))
}

fn chain(g: &Graph, link: LinkId) -> Result<(Vec<LinkId>, Vec<NodeId>), GraphError> {
    let l = *g.link(link)?;
    let mut links = VecDeque::from([link]);
    let mut nodes = VecDeque::from([l.a, l.b]);

    let next_through = |node: NodeId, came: LinkId| -> Option<LinkId> {
        let inc = g.incident(node).ok()?;
        (inc.len() == 2).then(|| if inc[0] == came { inc[1] } else { inc[0] })
    };

    let mut closed = false;
    while let Some(nx) = next_through(*nodes.back().unwrap(), *links.back().unwrap()) {
        if nx == link {
            closed = true;
            break;
        }
        let tail = *nodes.back().unwrap();
        nodes.push_back(g.link(nx)?.other(tail));
        links.push_back(nx);
    }
    if !closed {
        while let Some(nx) = next_through(*nodes.front().unwrap(), *links.front().unwrap()) {
            let head = *nodes.front().unwrap();
            nodes.push_front(g.link(nx)?.other(head));
            links.push_front(nx);
        }
    }

    let mut links: Vec<LinkId> = links.into();
    let mut nodes: Vec<NodeId> = nodes.into();

    if closed {
        // every node has degree 2: start the loop at its lowest node
        nodes.pop();
        let k = (0..nodes.len()).min_by_key(|&i| nodes[i]).unwrap();
        nodes.rotate_left(k);
        links.rotate_left(k);
        nodes.push(nodes[0]);
    }
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    if first > last || (first == last && links[0] > links[links.len() - 1]) {
        links.reverse();
        nodes.reverse();
    }
    Ok((links, nodes))
}

fn build(g: &Graph, id: SubpathId, links: Vec<LinkId>, nodes: Vec<NodeId>) -> Subpath {
    let pts: Vec<Vec2> = nodes.iter().map(|&n| g.pos(n)).collect();
    Subpath { id, links, nodes, polyline: Polyline::new(pts).expect("links have two endpoints") }
}

pub(crate) fn partition_subpaths(g: &Graph) -> (Vec<Subpath>, Vec<SubpathId>) {
    let mut owner: Vec<Option<SubpathId>> = vec![None; g.links().len()];
    let mut subpaths = Vec::new();
    for l in g.links() {
        if owner[g.link_index(l.id)].is_some() {
            continue;
        }
        let id = SubpathId(subpaths.len() as u32);
        let (links, nodes) = chain(g, l.id).expect("link exists");
        for &m in &links {
            owner[g.link_index(m)] = Some(id);
        }
        subpaths.push(build(g, id, links, nodes));
    }
    (subpaths, owner.into_iter().map(|o| o.expect("every link is covered")).collect())
}
