//! Gaze-driven path navigation on node-link graphs.
//!
//! The crate models a shared display showing a graph and a personal view
//! whose center acts as a cursor (the *gaze-cursor*). Navigation techniques
//! turn a stream of gaze samples into overlay frames and events; a task
//! harness scores path selection and path tracing trials; a simulator drives
//! the whole loop with scripted, jittery trajectories.

pub mod engine;
pub mod geometry;
pub mod graph;
pub mod session;
pub mod sim;
pub mod task;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/fans.md")]
    mod fans {}
    #[doc = include_str!("../../../book/src/sliding.md")]
    mod sliding {}
    #[doc = include_str!("../../../book/src/magnetic.md")]
    mod magnetic {}
    #[doc = include_str!("../../../book/src/tasks.md")]
    mod tasks {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
