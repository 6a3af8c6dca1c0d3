//! Renderer-free simulator and evaluation harness for natural-language drone
//! control.
//!
//! A language model steers a quadcopter with two primitives, `Turn(θ);` and
//! `Move(d);`, while a vision channel answers a binary "is the target in
//! view" question each step. The crate provides the planar world and its
//! dynamics, the strict command grammar that decides what counts as a valid
//! command, the perception stand-in, clients for model backends, the
//! episode loop, and the batch harness that turns traces into metrics.
//!
//! Episodes in a batch run on a rayon pool when the default `parallel`
//! feature is on, and sequentially otherwise; results are identical.

pub mod agent;
pub mod dynamics;
pub mod eval;
pub mod gateway;
pub mod grammar;
pub mod perception;
pub mod seeds;
pub mod world;

pub use agent::{run_episode, EpisodeConfig, EpisodeTrace, Outcome};
pub use eval::{compute_metrics, run_batch, MetricsReport, RunConfig};
pub use grammar::{parse_command, Action, ParseResult};
