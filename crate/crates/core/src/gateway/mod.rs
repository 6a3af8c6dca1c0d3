//! Uniform completion interface over the four backend kinds.
//!
//! Backends never keep conversation state between calls: whatever history
//! the agent wants the model to see travels inside `user_messages`.

mod noisy;
mod oracle;
mod remote;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::canonicalize;
use crate::world::{OccupancyGrid, Scenario, VehicleState};

pub use noisy::{NoisyBackend, INVALID_REPLIES};
pub use oracle::{oracle_pilot_command, PilotError, ALIGN_TOLERANCE_DEG};
pub use remote::{RemoteClient, RemoteConfig, DEFAULT_TIMEOUT_MS};

pub const DEFAULT_TEMPERATURE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub system_prompt: String,
    pub user_messages: Vec<String>,
    pub temperature: f64,
    pub model_name: String,
}

impl CompletionRequest {
    pub fn new(system_prompt: String, user_messages: Vec<String>, model_name: impl Into<String>) -> Self {
        Self { system_prompt, user_messages, temperature: DEFAULT_TEMPERATURE, model_name: model_name.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResponse {
    /// Verbatim completion text.
    pub text: String,
    /// Wall-clock milliseconds; zero for in-process backends.
    pub latency_ms: f64,
    pub backend_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "class", content = "detail")]
pub enum GatewayError {
    #[error("request timed out")]
    Timeout,
    #[error("connection refused")]
    ConnectionRefused,
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("server answered HTTP {0}")]
    HttpStatus(u16),
    #[error("malformed reply: {0}")]
    MalformedReply(String),
    #[error("scripted responses exhausted")]
    ResponsesExhausted,
    #[error("oracle pilot has no ground truth for this call")]
    MissingGroundTruth,
    #[error("oracle pilot: {0}")]
    Pilot(String),
}

impl GatewayError {
    /// Short class name, as printed by the CLI.
    pub fn class(&self) -> &'static str {
        match self {
            Self::Timeout => "Timeout",
            Self::ConnectionRefused => "ConnectionRefused",
            Self::Transport(_) => "Transport",
            Self::HttpStatus(_) => "HttpStatus",
            Self::MalformedReply(_) => "MalformedReply",
            Self::ResponsesExhausted => "ResponsesExhausted",
            Self::MissingGroundTruth => "MissingGroundTruth",
            Self::Pilot(_) => "Pilot",
        }
    }

    /// Errors meaning the backend could not be reached at all.
    pub fn is_connectivity(&self) -> bool {
        matches!(self, Self::Timeout | Self::ConnectionRefused | Self::Transport(_))
    }
}

/// Episode ground truth handed to the oracle pilot out of band.
#[derive(Debug, Clone, Copy)]
pub struct GroundTruth<'a> {
    pub state: &'a VehicleState,
    pub scenario: &'a Scenario,
    pub grid: &'a OccupancyGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendConfig {
    Remote(RemoteConfig),
    Scripted { responses: Vec<String> },
    OraclePilot,
    Noisy { valid_rate: f64, seed: u64 },
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            BackendConfig::Remote(r) => r.validate(),
            BackendConfig::Noisy { valid_rate, .. } if !(0.0..=1.0).contains(valid_rate) => {
                Err(format!("valid_rate {valid_rate} outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

/// Replays canned replies in order; an entry may also be a recorded failure.
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    queue: VecDeque<Result<String, GatewayError>>,
}

impl ScriptedBackend {
    pub fn new<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { queue: responses.into_iter().map(|s| Ok(s.into())).collect() }
    }

    pub fn with_outcomes(outcomes: impl IntoIterator<Item = Result<String, GatewayError>>) -> Self {
        Self { queue: outcomes.into_iter().collect() }
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }

    pub fn next_reply(&mut self) -> Result<String, GatewayError> {
        self.queue.pop_front().unwrap_or(Err(GatewayError::ResponsesExhausted))
    }
}

pub enum Backend {
    Remote(RemoteClient),
    Scripted(ScriptedBackend),
    OraclePilot,
    Noisy(NoisyBackend),
}

impl Backend {
    /// Builds a backend session for one episode. Seeded backends mix the
    /// episode seed in so episodes stay independent of each other.
    pub fn from_config(config: &BackendConfig, episode_seed: u64) -> Self {
        match config {
            BackendConfig::Remote(r) => Backend::Remote(RemoteClient::new(r.clone())),
            BackendConfig::Scripted { responses } => Backend::Scripted(ScriptedBackend::new(responses.iter().cloned())),
            BackendConfig::OraclePilot => Backend::OraclePilot,
            BackendConfig::Noisy { valid_rate, seed } => {
                Backend::Noisy(NoisyBackend::new(*valid_rate, crate::seeds::derive(*seed, episode_seed)))
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            Backend::Remote(r) => format!("remote:{}", r.config().model_name),
            Backend::Scripted(_) => "scripted".into(),
            Backend::OraclePilot => "oracle_pilot".into(),
            Backend::Noisy(n) => format!("noisy:{}", n.valid_rate()),
        }
    }

    pub fn model_name(&self) -> String {
        match self {
            Backend::Remote(r) => r.config().model_name.clone(),
            other => other.id(),
        }
    }

    pub fn complete(&mut self, request: &CompletionRequest, truth: Option<GroundTruth<'_>>) -> Result<ModelResponse, GatewayError> {
        let backend_id = self.id();
        let local = |text: String| ModelResponse { text, latency_ms: 0.0, backend_id: backend_id.clone() };
        match self {
            Backend::Remote(client) => client.complete(request),
            Backend::Scripted(s) => s.next_reply().map(local),
            Backend::OraclePilot => {
                let t = truth.ok_or(GatewayError::MissingGroundTruth)?;
                let action = oracle_pilot_command(t.state, t.scenario, t.grid).map_err(|e| GatewayError::Pilot(e.to_string()))?;
                Ok(local(canonicalize(&action)))
            }
            Backend::Noisy(n) => Ok(local(n.next_reply())),
        }
    }
}

/// Free-function form of [`Backend::complete`].
pub fn complete(backend: &mut Backend, request: &CompletionRequest, truth: Option<GroundTruth<'_>>) -> Result<ModelResponse, GatewayError> {
    backend.complete(request, truth)
}
