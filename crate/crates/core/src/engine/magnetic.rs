use super::{node_events, EngineEvent, EngineState, GazeSample, OverlayFrame, Ray, Target, TechniqueConfig};
use crate::engine::ElasticOverlay;
use crate::geometry::{elastic_deform, Projection};
use crate::graph::{Graph, LinkId};

/// `w_max + 1 - w`: smaller for heavier links.
pub fn distance_from_max_weight(w: u32, w_max: u32) -> f64 {
    f64::from(w_max.max(w) + 1 - w)
}

/// Magnetic value of a link (lower attracts more). The attached link gets
/// its crossing term discounted by `c_attached`.
pub fn magnetic_value(d_gc: f64, w: u32, w_max: u32, attached: bool, config: &TechniqueConfig) -> f64 {
    let c = if attached { config.c1 * config.c_attached } else { config.c1 };
    (d_gc + c) * distance_from_max_weight(w, w_max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Retarget {
    pub attachment: Option<LinkId>,
    /// Gaze projected onto the new attachment.
    pub projection: Option<Projection>,
    /// Strongest competitors, capped at `ray_cap`.
    pub rays: Vec<Ray>,
    /// Every competitor within the candidate radius, strongest first.
    pub competitors: Vec<Ray>,
}

/// Picks the attachment for this sample: the lowest-valued link within the
/// influence radius, the current attachment keeping it on ties.
pub fn magnetic_retarget(state: &EngineState, sample: GazeSample, graph: &Graph, config: &TechniqueConfig) -> Retarget {
    let current = match state.attachment {
        Some(Target::Link(l)) => Some(l),
        _ => None,
    };
    retarget_from(current, sample, graph, config)
}

pub(crate) fn retarget_from(
    current: Option<LinkId>,
    sample: GazeSample,
    graph: &Graph,
    config: &TechniqueConfig,
) -> Retarget {
    let w_max = graph.max_weight();
    let near = graph.links_within(sample.pos, config.candidate_radius);
    let weight = |l: LinkId| graph.link(l).expect("listed link").weight;

    let best = near
        .iter()
        .filter(|(_, pr)| pr.distance <= config.influence_radius)
        .map(|&(l, pr)| {
            let attached = Some(l) == current;
            (magnetic_value(pr.distance, weight(l), w_max, attached, config), !attached, l, pr)
        })
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let Some((v_att, _, link, projection)) = best else {
        return Retarget { attachment: None, projection: None, rays: Vec::new(), competitors: Vec::new() };
    };
    // value of the new attachment as an attached link
    let v_att = if Some(link) == current {
        v_att
    } else {
        magnetic_value(projection.distance, weight(link), w_max, true, config)
    };

    let mut competitors: Vec<Ray> = near
        .iter()
        .filter(|(l, _)| *l != link)
        .map(|&(l, pr)| {
            let v = magnetic_value(pr.distance, weight(l), w_max, false, config);
            Ray { link: l, attach: pr.point, intensity: (v_att / v).clamp(0.0, 1.0) }
        })
        .collect();
    competitors.sort_by(|a, b| b.intensity.partial_cmp(&a.intensity).expect("finite").then(a.link.cmp(&b.link)));
    let rays = competitors.iter().take(config.ray_cap).copied().collect();

    Retarget { attachment: Some(link), projection: Some(projection), rays, competitors }
}

/// Opacity of the elastic copy: fades out as the strongest competitor nears
/// the detachment boundary.
pub fn elastic_fade(competitors: &[Ray]) -> f64 {
    1.0 - competitors.iter().map(|r| r.intensity).fold(0.0, f64::max)
}

pub(crate) fn magnetic_step(
    state: &EngineState,
    sample: GazeSample,
    graph: &Graph,
    config: &TechniqueConfig,
) -> (EngineState, OverlayFrame, Vec<EngineEvent>) {
    let previous = match state.attachment {
        Some(Target::Link(l)) => Some(l),
        _ => None,
    };
    let rt = retarget_from(previous, sample, graph, config);
    let mut events = Vec::new();
    if rt.attachment != previous {
        if previous.is_some() {
            events.push(EngineEvent::Detached);
        }
        if let Some(l) = rt.attachment {
            events.push(EngineEvent::Attached { target: Target::Link(l) });
        }
    }

    let gaze = sample.pos;
    let mut frame = OverlayFrame::echo(sample.t, gaze);
    if let (Some(link), Some(pr)) = (rt.attachment, rt.projection) {
        frame.tracer = pr.point;
        match state.technique {
            super::Technique::MagneticElastic => {
                let sp = graph.subpath(graph.subpath_of(link).expect("attached link exists"));
                let anchor = sp.polyline.project(pr.point).arclen;
                frame.elastic = Some(ElasticOverlay {
                    subpath: sp.id,
                    curve: elastic_deform(&sp.polyline, gaze, anchor),
                    alpha: elastic_fade(&rt.competitors),
                });
            }
            _ => {
                frame.rope = Some([gaze, pr.point]);
                frame.rays = rt.rays.clone();
            }
        }
    }

    events.extend(node_events(graph, frame.tracer, config));
    if let (Some(link), Some(projection)) = (rt.attachment, rt.projection) {
        events.push(EngineEvent::CursorOverLink { link, projection });
    }

    let next = EngineState { attachment: rt.attachment.map(Target::Link), ..state.clone() };
    (next, frame, events)
}
