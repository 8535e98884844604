//! Scoring state machines for the two path-following tasks.
//!
//! A task path is completed element by element (start node, first link,
//! second node, ...), strictly in order. Selection only needs each element
//! to be touched; tracing additionally needs every link covered from end to
//! end by the technique's tracer, resuming where the tracer last left it.

use serde::{Deserialize, Serialize};

use crate::engine::{EngineEvent, OverlayFrame, Target};
use crate::geometry::{project_point_segment, Vec2};
use crate::graph::{Graph, PathElement, TaskPath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Selection,
    Tracing,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Selection => "selection",
            TaskKind::Tracing => "tracing",
        }
    }
}

impl std::str::FromStr for TaskKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "selection" => Ok(TaskKind::Selection),
            "tracing" => Ok(TaskKind::Tracing),
            _ => Err(format!("unknown task `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskConfig {
    pub node_hit_radius: f64,
    /// Maximum tracer distance from the link for tracing to count.
    pub trace_lateral_tol: f64,
    /// How far ahead of the frontier a tracer may land and still extend it.
    pub capture_window: f64,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig { node_hit_radius: 0.015, trace_lateral_tol: 0.01, capture_window: 0.04 }
    }
}

/// Timing starts when the start node is selected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialClock {
    pub start: Option<f64>,
    pub end: Option<f64>,
}

impl TrialClock {
    pub fn elapsed(&self) -> Option<f64> {
        Some(self.end? - self.start?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionTaskState {
    pub task_path: TaskPath,
    elements: Vec<PathElement>,
    pub next_index: usize,
    pub done: bool,
    pub clock: TrialClock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TracingTaskState {
    pub task_path: TaskPath,
    elements: Vec<PathElement>,
    pub next_index: usize,
    /// Meters traced along the current link, measured in path direction.
    pub frontier: f64,
    pub done: bool,
    pub clock: TrialClock,
}

impl SelectionTaskState {
    pub fn new(task_path: TaskPath) -> Self {
        let elements = task_path.elements();
        SelectionTaskState { task_path, elements, next_index: 0, done: false, clock: TrialClock::default() }
    }

    pub fn elements(&self) -> &[PathElement] {
        &self.elements
    }
}

impl TracingTaskState {
    pub fn new(task_path: TaskPath) -> Self {
        let elements = task_path.elements();
        TracingTaskState { task_path, elements, next_index: 0, frontier: 0.0, done: false, clock: TrialClock::default() }
    }

    pub fn elements(&self) -> &[PathElement] {
        &self.elements
    }

    /// Index into `task_path.links` of the link being traced, if any.
    pub fn current_link(&self) -> Option<usize> {
        match self.elements.get(self.next_index) {
            Some(PathElement::Link(_)) => Some(self.next_index / 2),
            _ => None,
        }
    }

    /// Total traced length: completed links plus the current frontier.
    pub fn traced_length(&self, g: &Graph) -> f64 {
        let full: f64 = self.task_path.links[..self.next_index.min(self.elements.len()) / 2]
            .iter()
            .map(|&l| g.link_length(l))
            .sum();
        full + if self.current_link().is_some() { self.frontier } else { 0.0 }
    }
}

fn completes(element: PathElement, events: &[EngineEvent]) -> bool {
    events.iter().any(|e| match (element, e) {
        (PathElement::Node(n), EngineEvent::CursorOverNode { node }) => *node == n,
        (PathElement::Link(l), EngineEvent::CursorOverLink { link, .. }) => *link == l,
        (PathElement::Link(l), EngineEvent::Attached { target: Target::Link(link) }) => *link == l,
        _ => false,
    })
}

fn mark(clock: &mut TrialClock, index: usize, last: bool, t: f64) {
    if index == 0 {
        clock.start = Some(t);
    }
    if last {
        clock.end = Some(t);
    }
}

/// Completes as many in-order elements as this step's events justify.
/// Events about later elements are ignored.
pub fn advance_selection(state: &SelectionTaskState, events: &[EngineEvent], frame: &OverlayFrame) -> SelectionTaskState {
    let mut st = state.clone();
    while !st.done && completes(st.elements[st.next_index], events) {
        let last = st.next_index + 1 == st.elements.len();
        mark(&mut st.clock, st.next_index, last, frame.t);
        st.next_index += 1;
        st.done = last;
    }
    st
}

/// Moves the tracing frontier with the technique's tracer point.
pub fn advance_tracing(state: &TracingTaskState, tracer: Vec2, t: f64, g: &Graph, config: &TaskConfig) -> TracingTaskState {
    let mut st = state.clone();
    while !st.done {
        let idx = st.next_index;
        let last = idx + 1 == st.elements.len();
        match st.elements[idx] {
            PathElement::Node(n) => {
                if tracer.distance(g.pos(n)) > config.node_hit_radius {
                    break;
                }
                st.frontier = 0.0;
            }
            PathElement::Link(_) => {
                let k = idx / 2;
                let (from, to) = (g.pos(st.task_path.nodes[k]), g.pos(st.task_path.nodes[k + 1]));
                let len = from.distance(to);
                let pr = project_point_segment(tracer, from, to).expect("links have length");
                if pr.distance <= config.trace_lateral_tol
                    && pr.arclen >= st.frontier
                    && pr.arclen <= st.frontier + config.capture_window
                {
                    st.frontier = pr.arclen;
                }
                if st.frontier < len - 1e-9 {
                    break;
                }
                st.frontier = 0.0;
            }
        }
        mark(&mut st.clock, idx, last, t);
        st.next_index += 1;
        st.done = last;
    }
    st
}

/// Completion flag and elapsed seconds (`None` before the clock starts or
/// while incomplete).
pub fn trial_complete(clock: &TrialClock, done: bool) -> (bool, Option<f64>) {
    (done, if done { clock.elapsed() } else { None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementStatus {
    Done,
    Active,
    Pending,
}

/// Per-element status for progress rendering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgressSnapshot {
    pub task: TaskKind,
    pub status: Vec<ElementStatus>,
    /// Fraction of the current link traced (tracing only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frontier_fraction: Option<f64>,
    pub done: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

fn statuses(n: usize, next: usize) -> Vec<ElementStatus> {
    (0..n)
        .map(|i| match i.cmp(&next) {
            std::cmp::Ordering::Less => ElementStatus::Done,
            std::cmp::Ordering::Equal => ElementStatus::Active,
            std::cmp::Ordering::Greater => ElementStatus::Pending,
        })
        .collect()
}

/// Either task, for callers that dispatch on the task kind at run time.
#[derive(Clone, Debug, PartialEq)]
pub enum TaskState {
    Selection(SelectionTaskState),
    Tracing(TracingTaskState),
}

impl TaskState {
    pub fn new(kind: TaskKind, path: TaskPath) -> Self {
        match kind {
            TaskKind::Selection => TaskState::Selection(SelectionTaskState::new(path)),
            TaskKind::Tracing => TaskState::Tracing(TracingTaskState::new(path)),
        }
    }

    pub fn kind(&self) -> TaskKind {
        match self {
            TaskState::Selection(_) => TaskKind::Selection,
            TaskState::Tracing(_) => TaskKind::Tracing,
        }
    }

    pub fn advance(&self, events: &[EngineEvent], frame: &OverlayFrame, g: &Graph, config: &TaskConfig) -> TaskState {
        match self {
            TaskState::Selection(s) => TaskState::Selection(advance_selection(s, events, frame)),
            TaskState::Tracing(s) => TaskState::Tracing(advance_tracing(s, frame.tracer, frame.t, g, config)),
        }
    }

    pub fn next_index(&self) -> usize {
        match self {
            TaskState::Selection(s) => s.next_index,
            TaskState::Tracing(s) => s.next_index,
        }
    }

    pub fn next_element(&self) -> Option<PathElement> {
        let (els, i) = match self {
            TaskState::Selection(s) => (&s.elements, s.next_index),
            TaskState::Tracing(s) => (&s.elements, s.next_index),
        };
        els.get(i).copied()
    }

    pub fn frontier(&self) -> f64 {
        match self {
            TaskState::Selection(_) => 0.0,
            TaskState::Tracing(s) => s.frontier,
        }
    }

    pub fn path(&self) -> &TaskPath {
        match self {
            TaskState::Selection(s) => &s.task_path,
            TaskState::Tracing(s) => &s.task_path,
        }
    }

    pub fn done(&self) -> bool {
        match self {
            TaskState::Selection(s) => s.done,
            TaskState::Tracing(s) => s.done,
        }
    }

    pub fn clock(&self) -> TrialClock {
        match self {
            TaskState::Selection(s) => s.clock,
            TaskState::Tracing(s) => s.clock,
        }
    }

    pub fn complete(&self) -> (bool, Option<f64>) {
        trial_complete(&self.clock(), self.done())
    }

    /// Monotone progress measure: element index plus frontier meters.
    pub fn progress_key(&self) -> (usize, f64) {
        (self.next_index(), self.frontier())
    }

    pub fn snapshot(&self, g: &Graph) -> ProgressSnapshot {
        let n = self.path().elements().len();
        let frontier_fraction = match self {
            TaskState::Tracing(s) => s.current_link().map(|k| s.frontier / g.link_length(s.task_path.links[k])),
            TaskState::Selection(_) => None,
        };
        ProgressSnapshot {
            task: self.kind(),
            status: statuses(n, self.next_index()),
            frontier_fraction,
            done: self.done(),
            elapsed: self.complete().1,
        }
    }
}
