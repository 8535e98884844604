//! Line-delimited JSON session protocol for interactive front ends.
//!
//! Each client line is one envelope `{"v": 1, "type": ..., ...}`:
//!
//! * `gaze` with `t`, `x`, `y` (display meters) is answered by exactly one
//!   `frame` line carrying the overlay, the task progress and the events of
//!   that step;
//! * `set` with `technique`, `graph`, `path_kind`, `task` and an optional
//!   `seed` resets the engine and the task and is answered by a `scene` line
//!   with the graph document and the task path.
//!
//! Anything malformed gets an `error` line and leaves the session as it was.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{self, EngineEvent, EngineState, GazeSample, OverlayFrame, Technique};
use crate::graph::{sample_task_path, save_graph, Graph, PathKind, PathRequest, TaskPath};
use crate::sim::{build_graph, GraphKind, PathSettings, SimError, SmallWorldParams, TrialConfig};
use crate::task::{ProgressSnapshot, TaskKind, TaskState};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Gaze {
        t: f64,
        x: f64,
        y: f64,
    },
    Set {
        technique: Technique,
        graph: GraphKind,
        path_kind: PathKind,
        task: TaskKind,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ServerMessage {
    Frame {
        overlay: OverlayFrame,
        task: ProgressSnapshot,
        events: Vec<EngineEvent>,
    },
    Scene {
        technique: Technique,
        graph_kind: GraphKind,
        path_kind: PathKind,
        task: TaskKind,
        seed: u64,
        graph: serde_json::Value,
        path: TaskPath,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("unsupported protocol version {0}")]
    UnsupportedVersion(u64),
    #[error("missing protocol version")]
    MissingVersion,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    v: u32,
    #[serde(flatten)]
    body: &'a T,
}

/// Validates one client line against the versioned schema.
pub fn parse_client(line: &str) -> Result<ClientMessage, ProtocolError> {
    let mut value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    let obj = value.as_object_mut().ok_or_else(|| ProtocolError::Malformed("expected an object".into()))?;
    match obj.remove("v") {
        None => return Err(ProtocolError::MissingVersion),
        Some(v) => match v.as_u64() {
            Some(v) if v == PROTOCOL_VERSION as u64 => {}
            Some(v) => return Err(ProtocolError::UnsupportedVersion(v)),
            None => return Err(ProtocolError::Malformed("`v` must be an integer".into())),
        },
    }
    serde_json::from_value(value).map_err(|e| ProtocolError::Malformed(e.to_string()))
}

pub fn encode_client(msg: &ClientMessage) -> String {
    serde_json::to_string(&Envelope { v: PROTOCOL_VERSION, body: msg }).expect("client messages serialize")
}

pub fn encode_server(msg: &ServerMessage) -> String {
    serde_json::to_string(&Envelope { v: PROTOCOL_VERSION, body: msg }).expect("server messages serialize")
}

/// Base graphs shared by all sessions of a server.
#[derive(Debug)]
pub struct Catalog {
    metro: Graph,
    small_world: Graph,
    pub config: TrialConfig,
    pub path: PathSettings,
}

impl Catalog {
    pub fn new(small_world: &SmallWorldParams, config: TrialConfig, path: PathSettings) -> Result<Self, SimError> {
        Ok(Catalog {
            metro: build_graph(GraphKind::Metro, small_world)?,
            small_world: build_graph(GraphKind::SmallWorld, small_world)?,
            config,
            path,
        })
    }

    pub fn graph(&self, kind: GraphKind) -> &Graph {
        match kind {
            GraphKind::Metro => &self.metro,
            GraphKind::SmallWorld => &self.small_world,
        }
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog::new(&SmallWorldParams::default(), TrialConfig::default(), PathSettings::default())
            .expect("default graphs build")
    }
}

struct Scene {
    technique: Technique,
    graph_kind: GraphKind,
    path_kind: PathKind,
    task_kind: TaskKind,
    seed: u64,
    graph: Graph,
    path: TaskPath,
}

/// One client's engine and task state.
pub struct Session {
    catalog: Arc<Catalog>,
    scene: Scene,
    engine: EngineState,
    task: TaskState,
    last_t: Option<f64>,
}

impl Session {
    /// Starts on SlidingRing tracing over a weighted metro path.
    pub fn new(catalog: Arc<Catalog>) -> Result<Self, SimError> {
        let scene = build_scene(&catalog, Technique::SlidingRing, GraphKind::Metro, PathKind::Weighted, TaskKind::Tracing, 0)?;
        let engine = engine::init(scene.technique, &scene.graph, &catalog.config.technique, Some(scene.path.start()))?;
        let task = TaskState::new(scene.task_kind, scene.path.clone());
        Ok(Session { catalog, scene, engine, task, last_t: None })
    }

    pub fn graph(&self) -> &Graph {
        &self.scene.graph
    }

    pub fn path(&self) -> &TaskPath {
        &self.scene.path
    }

    pub fn scene_message(&self) -> ServerMessage {
        let s = &self.scene;
        ServerMessage::Scene {
            technique: s.technique,
            graph_kind: s.graph_kind,
            path_kind: s.path_kind,
            task: s.task_kind,
            seed: s.seed,
            graph: serde_json::from_str(&save_graph(&s.graph)).expect("graph documents are JSON"),
            path: s.path.clone(),
        }
    }

    pub fn handle(&mut self, msg: ClientMessage) -> ServerMessage {
        match msg {
            ClientMessage::Gaze { t, x, y } => self.gaze(GazeSample::new(t, x, y)),
            ClientMessage::Set { technique, graph, path_kind, task, seed } => {
                match build_scene(&self.catalog, technique, graph, path_kind, task, seed) {
                    Ok(scene) => {
                        let start = Some(scene.path.start());
                        match engine::init(technique, &scene.graph, &self.catalog.config.technique, start) {
                            Ok(engine) => {
                                self.task = TaskState::new(task, scene.path.clone());
                                self.engine = engine;
                                self.scene = scene;
                                self.last_t = None;
                                self.scene_message()
                            }
                            Err(e) => ServerMessage::Error { message: e.to_string() },
                        }
                    }
                    Err(e) => ServerMessage::Error { message: e.to_string() },
                }
            }
        }
    }

    fn gaze(&mut self, sample: GazeSample) -> ServerMessage {
        if !(sample.t.is_finite() && sample.pos.x.is_finite() && sample.pos.y.is_finite()) {
            return ServerMessage::Error { message: "gaze values must be finite".into() };
        }
        if self.last_t.is_some_and(|t| sample.t < t) {
            return ServerMessage::Error { message: format!("gaze time {} goes backwards", sample.t) };
        }
        self.last_t = Some(sample.t);
        let g = &self.scene.graph;
        let out = engine::step(&self.engine, sample, g, &self.catalog.config.technique);
        self.task = self.task.advance(&out.events, &out.frame, g, &self.catalog.config.task);
        self.engine = out.state;
        ServerMessage::Frame { overlay: out.frame, task: self.task.snapshot(g), events: out.events }
    }

    /// Parses, handles and encodes one protocol line.
    pub fn handle_line(&mut self, line: &str) -> String {
        let reply = match parse_client(line) {
            Ok(msg) => self.handle(msg),
            Err(e) => ServerMessage::Error { message: e.to_string() },
        };
        encode_server(&reply)
    }
}

fn build_scene(
    catalog: &Catalog,
    technique: Technique,
    graph_kind: GraphKind,
    path_kind: PathKind,
    task_kind: TaskKind,
    seed: u64,
) -> Result<Scene, SimError> {
    let req = PathRequest {
        length: catalog.path.length,
        kind: path_kind,
        require_long_link: catalog.path.require_long_link,
        avoid_crossings: catalog.path.avoid_crossings,
        seed,
    };
    let (path, graph) = sample_task_path(catalog.graph(graph_kind), &req)?;
    Ok(Scene { technique, graph_kind, path_kind, task_kind, seed, graph, path })
}

/// Runs a session over one connection until the client hangs up.
pub fn serve_connection(stream: TcpStream, catalog: Arc<Catalog>) -> std::io::Result<()> {
    let mut session = Session::new(catalog).map_err(std::io::Error::other)?;
    stream.set_nodelay(true)?;
    let mut out = stream.try_clone()?;
    for line in BufReader::new(stream).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut reply = session.handle_line(&line);
        reply.push('\n');
        out.write_all(reply.as_bytes())?;
    }
    Ok(())
}

/// Accepts connections forever, one thread and one session each.
pub fn serve(listener: TcpListener, catalog: Arc<Catalog>) -> std::io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let catalog = Arc::clone(&catalog);
        std::thread::spawn(move || {
            let _ = serve_connection(stream, catalog);
        });
    }
    Ok(())
}

/// Replays a recorded client transcript against a fresh session and
/// returns the encoded replies.
pub fn replay_transcript<'a>(catalog: Arc<Catalog>, lines: impl IntoIterator<Item = &'a str>) -> Result<Vec<String>, SimError> {
    let mut session = Session::new(catalog)?;
    Ok(lines.into_iter().filter(|l| !l.trim().is_empty()).map(|l| session.handle_line(l)).collect())
}
