use serde::{Deserialize, Serialize};

use super::{Extent, Graph, GraphError, Link, LinkId, Node, NodeId};
use crate::geometry::Vec2;

pub const GRAPH_FORMAT_VERSION: u32 = 1;

/// The metro-style fixture shipped with the crate (302 nodes, 369 links).
pub const METRO_FIXTURE: &str = include_str!("../../fixtures/metro.graph");

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDocument {
    version: u32,
    display_extent: Extent,
    nodes: Vec<NodeRecord>,
    links: Vec<LinkRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    id: u32,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkRecord {
    id: u32,
    a: u32,
    b: u32,
    w: u32,
}

/// Parses and validates a graph document.
pub fn load_graph(document: &str) -> Result<Graph, GraphError> {
    let doc: GraphDocument = serde_json::from_str(document)
        .map_err(|e| GraphError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    if doc.version != GRAPH_FORMAT_VERSION {
        return Err(GraphError::UnsupportedVersion(doc.version));
    }
    let nodes = doc.nodes.iter().map(|n| Node { id: NodeId(n.id), pos: Vec2::new(n.x, n.y) }).collect();
    let links = doc
        .links
        .iter()
        .map(|l| Link { id: LinkId(l.id), a: NodeId(l.a), b: NodeId(l.b), weight: l.w })
        .collect();
    Graph::new(doc.display_extent, nodes, links)
}

pub fn load_metro() -> Graph {
    load_graph(METRO_FIXTURE).expect("bundled fixture is valid")
}

/// Serializes a graph in the document format accepted by [`load_graph`].
pub fn save_graph(g: &Graph) -> String {
    let doc = GraphDocument {
        version: GRAPH_FORMAT_VERSION,
        display_extent: g.extent(),
        nodes: g.nodes().iter().map(|n| NodeRecord { id: n.id.0, x: n.pos.x, y: n.pos.y }).collect(),
        links: g.links().iter().map(|l| LinkRecord { id: l.id.0, a: l.a.0, b: l.b.0, w: l.weight }).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph documents always serialize")
}
