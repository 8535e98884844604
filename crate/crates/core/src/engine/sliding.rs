use super::magnetic::distance_from_max_weight;
use super::{
    hovered_links, node_events, ElasticOverlay, EngineEvent, EngineState, GazeSample, OverlayFrame, Target,
    Technique, TechniqueConfig,
};
use crate::geometry::{elastic_deform, fan_slices, SliceSet, Vec2};
use crate::graph::{Graph, LinkId, NodeId, Subpath, SubpathId};

/// Gaze presence inside a node's hit radius. Slices are fixed on entry.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeVisit {
    pub node: NodeId,
    pub slices: SliceSet,
    /// Link the ring arrived on, if attached.
    pub arrival: Option<LinkId>,
}

impl NodeVisit {
    fn enter(g: &Graph, node: NodeId, arrival: Option<LinkId>) -> Self {
        NodeVisit { node, slices: node_fan(g, node), arrival }
    }
}

/// Weighted fan of every link incident to `node`, in link id order.
pub fn node_fan(g: &Graph, node: NodeId) -> SliceSet {
    let center = g.pos(node);
    let inc = g.incident(node).expect("known node");
    let angles: Vec<f64> = inc
        .iter()
        .map(|&l| (g.pos(g.link(l).expect("incident").other(node)) - center).bearing())
        .collect();
    let weights: Vec<u32> = inc.iter().map(|&l| g.link(l).expect("incident").weight).collect();
    fan_slices(&angles, &weights).expect("visited nodes have links")
}

/// Next link at `node`.
///
/// With `slices`, the gaze is leaving the node and the link owning its exit
/// bearing wins (this may be the arrival link, meaning "stay"). Without, the
/// gaze is elsewhere and the link minimizing `d_gc * (w_max + 1 - w)` wins,
/// skipping the arrival link unless it is the only one.
pub fn sliding_choose_link(
    g: &Graph,
    node: NodeId,
    gaze: Vec2,
    slices: Option<&SliceSet>,
    arrival: Option<LinkId>,
) -> LinkId {
    let inc = g.incident(node).expect("known node");
    if let Some(slices) = slices {
        let bearing = (gaze - g.pos(node)).bearing();
        return inc[slices.link_at(bearing)];
    }
    if inc.len() == 1 {
        return inc[0];
    }
    inc.iter()
        .copied()
        .filter(|&l| Some(l) != arrival)
        .map(|l| (sliding_value(g, l, gaze), l))
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)))
        .map(|(_, l)| l)
        .unwrap_or(inc[0])
}

fn sliding_value(g: &Graph, link: LinkId, gaze: Vec2) -> f64 {
    let d = g.project_on_link(link, gaze).distance;
    d * distance_from_max_weight(g.link(link).expect("known link").weight, g.max_weight())
}

fn arrival_link(sp: &Subpath, node: NodeId, ring_arclen: f64) -> Option<LinkId> {
    if sp.start() == node && sp.end() == node {
        let first = ring_arclen < sp.total_length() / 2.0;
        return Some(if first { sp.links[0] } else { sp.links[sp.links.len() - 1] });
    }
    sp.end_link(node)
}

fn ring_endpoint(sp: &Subpath, ring_arclen: f64) -> Option<NodeId> {
    if ring_arclen <= 0.0 {
        Some(sp.start())
    } else if ring_arclen >= sp.total_length() {
        Some(sp.end())
    } else {
        None
    }
}

/// Transfers the ring onto the subpath of `link`, placed at the gaze's
/// projection so it does not lag behind the gaze that just left `node`.
fn attach_at_node(st: &mut EngineState, g: &Graph, link: LinkId, gaze: Vec2, events: &mut Vec<EngineEvent>) -> SubpathId {
    let id = g.subpath_of(link).expect("incident link");
    st.ring_arclen = g.subpath(id).polyline.project(gaze).arclen;
    st.attachment = Some(Target::Subpath(id));
    events.push(EngineEvent::Attached { target: Target::Subpath(id) });
    id
}

pub(crate) fn sliding_step(
    state: &EngineState,
    sample: GazeSample,
    g: &Graph,
    config: &TechniqueConfig,
) -> (EngineState, OverlayFrame, Vec<EngineEvent>) {
    let gaze = sample.pos;
    let r = config.node_hit_radius;
    let mut st = state.clone();
    let mut events = Vec::new();

    let attached = match state.attachment {
        Some(Target::Subpath(id)) => Some(id),
        _ => None,
    };

    let Some(id) = attached else {
        st.attachment = None;
        if let Some(start) = st.start_hint {
            let inside = gaze.distance(g.pos(start)) <= r;
            match (&st.in_node, inside) {
                (None, true) => st.in_node = Some(NodeVisit::enter(g, start, None)),
                (Some(v), false) => {
                    let link = sliding_choose_link(g, v.node, gaze, Some(&v.slices), None);
                    st.in_node = None;
                    events.push(EngineEvent::SliceCommitted { link });
                    attach_at_node(&mut st, g, link, gaze, &mut events);
                }
                _ => {}
            }
        }
        if st.attachment.is_none() && st.in_node.is_none() {
            let w_max = g.max_weight();
            let best = hovered_links(g, gaze, config)
                .into_iter()
                .map(|(l, pr)| {
                    let w = g.link(l).expect("hovered").weight;
                    (pr.distance * distance_from_max_weight(w, w_max), l)
                })
                .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
            if let Some((_, link)) = best {
                let id = g.subpath_of(link).expect("hovered link");
                st.attachment = Some(Target::Subpath(id));
                st.ring_arclen = g.subpath(id).polyline.project(gaze).arclen;
                events.push(EngineEvent::Attached { target: Target::Subpath(id) });
            }
        }
        if st.attachment.is_none() {
            events.extend(node_events(g, gaze, config));
            return (st, OverlayFrame::echo(sample.t, gaze), events);
        }
        return finish(st, sample, g, config, events);
    };

    let sp = g.subpath(id);
    st.ring_arclen = match (state.technique, state.last_gaze) {
        (Technique::SlidingElastic, Some(prev)) => {
            elastic_deform(&sp.polyline, prev.pos, state.ring_arclen).source_arclen_of(gaze)
        }
        _ => sp.polyline.project(gaze).arclen,
    };

    let mut transferred = false;
    if let Some(v) = st.in_node.clone() {
        if gaze.distance(g.pos(v.node)) > r {
            st.in_node = None;
            let link = sliding_choose_link(g, v.node, gaze, Some(&v.slices), v.arrival);
            if Some(link) != v.arrival {
                events.push(EngineEvent::SliceCommitted { link });
                attach_at_node(&mut st, g, link, gaze, &mut events);
                transferred = true;
            }
        }
    } else {
        for node in [sp.start(), sp.end()] {
            if gaze.distance(g.pos(node)) <= r {
                st.in_node = Some(NodeVisit::enter(g, node, arrival_link(sp, node, st.ring_arclen)));
                break;
            }
        }
    }

    if state.technique == Technique::SlidingRing && !transferred && st.in_node.is_none() {
        if let Some(node) = ring_endpoint(sp, st.ring_arclen) {
            if gaze.distance(g.pos(node)) > r {
                let arrival = arrival_link(sp, node, st.ring_arclen);
                let link = sliding_choose_link(g, node, gaze, None, arrival);
                let better = match arrival {
                    Some(a) => sliding_value(g, a, gaze) > sliding_value(g, link, gaze),
                    None => true,
                };
                if Some(link) != arrival && better {
                    attach_at_node(&mut st, g, link, gaze, &mut events);
                }
            }
        }
    }

    finish(st, sample, g, config, events)
}

fn finish(
    st: EngineState,
    sample: GazeSample,
    g: &Graph,
    config: &TechniqueConfig,
    mut events: Vec<EngineEvent>,
) -> (EngineState, OverlayFrame, Vec<EngineEvent>) {
    let Some(Target::Subpath(id)) = st.attachment else { unreachable!("finish runs attached") };
    let sp = g.subpath(id);
    let gaze = sample.pos;
    let (ring, seg) = sp.polyline.point_at(st.ring_arclen);

    let mut frame = OverlayFrame::echo(sample.t, gaze);
    frame.tracer = ring;
    if st.technique == Technique::SlidingElastic {
        let curve = elastic_deform(&sp.polyline, gaze, st.ring_arclen);
        frame.ring = Some(curve.anchor());
        frame.elastic = Some(ElasticOverlay { subpath: id, curve, alpha: 1.0 });
    } else {
        frame.ring = Some(ring);
        frame.trail = Some([gaze, ring]);
    }

    if let Some(node) = ring_endpoint(sp, st.ring_arclen) {
        events.push(EngineEvent::RingAtNode { node });
    }
    events.extend(node_events(g, ring, config));
    let link = sp.links[seg];
    events.push(EngineEvent::CursorOverLink { link, projection: g.project_on_link(link, ring) });
    (st, frame, events)
}
