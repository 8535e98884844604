//! Graph data model, file format, generators, subpaths and task paths.

mod generate;
mod grid;
mod io;
mod layout;
mod model;
mod sample;
mod subpath;

pub use generate::{generate_small_world, ring_lattice, DEFAULT_EXTENT};
pub use io::{load_graph, load_metro, save_graph, GRAPH_FORMAT_VERSION, METRO_FIXTURE};
pub use layout::{force_layout, layout_force_directed, LayoutParams};
pub use model::{Extent, Graph, Link, LinkId, Node, NodeId, SubpathId};
pub use sample::{link_length_percentile, links_cross, sample_task_path, PathElement, PathKind, PathRequest, TaskPath};
pub use subpath::{extract_subpath, Subpath};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported graph format version {0}")]
    UnsupportedVersion(u32),
    #[error("display extent {w} x {h} must be positive and finite")]
    BadExtent { w: f64, h: f64 },
    #[error("nodes[{index}]: duplicate id {id}")]
    DuplicateNode { index: usize, id: NodeId },
    #[error("nodes[{index}] ({id}): position is not finite")]
    NonFinite { index: usize, id: NodeId },
    #[error("nodes[{index}] ({id}): position outside the display extent")]
    OutOfExtent { index: usize, id: NodeId },
    #[error("links[{index}]: duplicate id {id}")]
    DuplicateLink { index: usize, id: LinkId },
    #[error("links[{index}] ({id}): dangling endpoint {node}")]
    DanglingEndpoint { index: usize, id: LinkId, node: NodeId },
    #[error("links[{index}] ({id}): weight < 1 (got {weight})")]
    BadWeight { index: usize, id: LinkId, weight: u32 },
    #[error("links[{index}] ({id}): self-loop")]
    SelfLoop { index: usize, id: LinkId },
    #[error("links[{index}] ({id}): parallel to {other}")]
    ParallelLink { index: usize, id: LinkId, other: LinkId },
    #[error("links[{index}] ({id}): endpoints share a position")]
    ZeroLength { index: usize, id: LinkId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no connected graph after {attempts} attempts")]
    NotConnected { attempts: u32 },
    #[error("no valid task path after {attempts} attempts")]
    NoPath { attempts: u32 },
    #[error("invalid task path: {0}")]
    InvalidPath(String),
}
