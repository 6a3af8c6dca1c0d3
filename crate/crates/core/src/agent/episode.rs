use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::prompt::{build_llm_prompt, build_vlm_query, describe_scene, PromptContext, PROMPT_VERSION};
use super::trace::{EpisodeTrace, Outcome, StepEvent, StepRecord, TraceHeader};
use super::{CommandHistory, DEFAULT_HISTORY_LEN};
use crate::dynamics::{apply_action, takeoff, NoiseConfig};
use crate::gateway::{
    Backend, CompletionRequest, GatewayError, GroundTruth, ModelResponse, RemoteClient, RemoteConfig,
    ScriptedBackend, DEFAULT_TEMPERATURE,
};
use crate::grammar::parse_command;
use crate::perception::{parse_vlm_response, simulate_detection, visible, CameraModel, DetectorNoise};
use crate::seeds;
use crate::world::{goal_reached, rasterize, OccupancyGrid, Scenario, ScenarioError, VehicleState, DEFAULT_CELL_SIZE};

pub const DEFAULT_K_MAX: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    /// Inference-step budget.
    pub k_max: usize,
    pub history_len: usize,
    pub dynamics_noise: NoiseConfig,
    pub camera: CameraModel,
    /// Lists obstacle centers in the environmental cues.
    pub reveal_obstacles: bool,
    pub cell_size: f64,
    pub temperature: f64,
    /// Consecutive connectivity failures after which the episode is aborted.
    pub max_connectivity_failures: usize,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            k_max: DEFAULT_K_MAX,
            history_len: DEFAULT_HISTORY_LEN,
            dynamics_noise: NoiseConfig::disabled(),
            camera: CameraModel::default(),
            reveal_obstacles: false,
            cell_size: DEFAULT_CELL_SIZE,
            temperature: DEFAULT_TEMPERATURE,
            max_connectivity_failures: 3,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.k_max == 0 {
            return Err("k_max must be at least 1".into());
        }
        if !self.dynamics_noise.is_valid() {
            return Err("noise sigmas must be finite and non-negative".into());
        }
        if !self.camera.is_valid() {
            return Err("camera fov must lie in (0, 180] and range be positive".into());
        }
        if !(self.cell_size > 0.0) {
            return Err("cell_size must be positive".into());
        }
        if !(self.temperature >= 0.0) {
            return Err("temperature must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VlmChannelConfig {
    /// Geometric visibility corrupted by detector noise.
    Simulated { noise: DetectorNoise },
    /// A remote vision model fed a text description of the scene.
    Remote(RemoteConfig),
    Scripted { responses: Vec<String> },
}

impl Default for VlmChannelConfig {
    fn default() -> Self {
        VlmChannelConfig::Simulated { noise: DetectorNoise::default() }
    }
}

impl VlmChannelConfig {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            VlmChannelConfig::Simulated { noise } => noise.validate().map_err(|e| e.to_string()),
            VlmChannelConfig::Remote(r) => r.validate(),
            VlmChannelConfig::Scripted { .. } => Ok(()),
        }
    }

    /// Whether the channel sees real geometry (false for text-described scenes).
    pub fn is_faithful(&self) -> bool {
        !matches!(self, VlmChannelConfig::Remote(_))
    }
}

pub enum VlmChannel {
    Simulated { noise: DetectorNoise, rng: ChaCha8Rng },
    Remote(RemoteClient),
    Scripted(ScriptedBackend),
}

impl VlmChannel {
    pub fn from_config(config: &VlmChannelConfig, episode_seed: u64) -> Self {
        match config {
            VlmChannelConfig::Simulated { noise } => VlmChannel::Simulated {
                noise: *noise,
                rng: ChaCha8Rng::seed_from_u64(seeds::derive(episode_seed, seeds::PERCEPTION_STREAM)),
            },
            VlmChannelConfig::Remote(r) => VlmChannel::Remote(RemoteClient::new(r.clone())),
            VlmChannelConfig::Scripted { responses } => VlmChannel::Scripted(ScriptedBackend::new(responses.iter().cloned())),
        }
    }

    pub fn noiseless() -> Self {
        Self::from_config(&VlmChannelConfig::default(), 0)
    }

    pub fn id(&self) -> String {
        match self {
            VlmChannel::Simulated { noise, .. } if noise.is_zero() => "simulated:noiseless".into(),
            VlmChannel::Simulated { .. } => "simulated:noisy".into(),
            VlmChannel::Remote(r) => format!("remote:{}", r.config().model_name),
            VlmChannel::Scripted(_) => "scripted".into(),
        }
    }

    fn observe(
        &mut self,
        state: &VehicleState,
        scenario: &Scenario,
        target_visible: bool,
        temperature: f64,
    ) -> Result<ModelResponse, GatewayError> {
        let local = |text: String, id: String| ModelResponse { text, latency_ms: 0.0, backend_id: id };
        let id = self.id();
        match self {
            VlmChannel::Simulated { noise, rng } => {
                Ok(local(simulate_detection(target_visible, noise, rng).to_reply(), id))
            }
            VlmChannel::Scripted(s) => s.next_reply().map(|t| local(t, id)),
            VlmChannel::Remote(client) => {
                let (system, question) = build_vlm_query(scenario.target.object_class);
                let mut request = CompletionRequest::new(
                    system,
                    vec![describe_scene(state, scenario, target_visible), question],
                    client.config().model_name.clone(),
                );
                request.temperature = temperature;
                client.complete(&request)
            }
        }
    }
}

/// One episode in progress. Call [`EpisodeRunner::step`] until
/// [`EpisodeRunner::outcome`] is set, then take the trace.
pub struct EpisodeRunner<'a> {
    scenario: &'a Scenario,
    config: &'a EpisodeConfig,
    grid: OccupancyGrid,
    llm: Backend,
    vlm: VlmChannel,
    state: VehicleState,
    history: CommandHistory,
    dynamics_rng: ChaCha8Rng,
    connectivity_failures: usize,
    header: TraceHeader,
    records: Vec<StepRecord>,
    outcome: Option<Outcome>,
}

impl<'a> EpisodeRunner<'a> {
    pub fn new(
        scenario: &'a Scenario,
        llm: Backend,
        vlm: VlmChannel,
        config: &'a EpisodeConfig,
        episode_seed: u64,
    ) -> Result<Self, ScenarioError> {
        let grid = rasterize(scenario, config.cell_size)?;
        let header = TraceHeader {
            prompt_version: PROMPT_VERSION.to_string(),
            episode_index: 0,
            episode_seed,
            llm_backend: llm.id(),
            vlm_channel: vlm.id(),
            scenario: scenario.clone(),
            config: config.clone(),
        };
        Ok(Self {
            scenario,
            config,
            grid,
            llm,
            vlm,
            state: takeoff(scenario),
            history: CommandHistory::new(config.history_len),
            dynamics_rng: ChaCha8Rng::seed_from_u64(seeds::derive(episode_seed, seeds::DYNAMICS_STREAM)),
            connectivity_failures: 0,
            header,
            records: Vec::new(),
            outcome: None,
        })
    }

    pub fn state(&self) -> &VehicleState {
        &self.state
    }

    pub fn history(&self) -> &CommandHistory {
        &self.history
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    /// VLM query, LLM request, parse, and (for a valid command) transition.
    ///
    /// # Panics
    /// If the episode has already ended.
    pub fn step(&mut self) -> &StepRecord {
        assert!(self.outcome.is_none(), "step called on a finished episode");
        let k = self.records.len();
        let pre = self.state;
        let scenario = self.scenario;
        let target_visible = visible(&pre, &scenario.target, &scenario.obstacles, &self.config.camera);
        let mut record = StepRecord {
            k,
            pre_state: pre,
            target_visible,
            vlm_raw: None,
            detection: None,
            llm_system: String::new(),
            llm_users: Vec::new(),
            llm_raw: None,
            llm_latency_ms: 0.0,
            parse: None,
            backend_error: None,
            post_state: pre,
            events: Vec::new(),
        };

        let result = self
            .vlm
            .observe(&pre, scenario, target_visible, self.config.temperature)
            .map_err(|e| (super::Channel::Vlm, e))
            .and_then(|vlm_reply| {
                let detection = parse_vlm_response(&vlm_reply.text);
                let context = PromptContext::new(&pre, scenario, &detection, self.config.reveal_obstacles);
                let (system, users) = build_llm_prompt(&context, &self.history);
                record.vlm_raw = Some(vlm_reply.text);
                record.detection = Some(detection);
                let mut request = CompletionRequest::new(system, users, self.llm.model_name());
                request.temperature = self.config.temperature;
                let truth = GroundTruth { state: &pre, scenario, grid: &self.grid };
                let reply = self.llm.complete(&request, Some(truth));
                record.llm_system = request.system_prompt;
                record.llm_users = request.user_messages;
                reply.map_err(|e| (super::Channel::Llm, e))
            });

        match result {
            Err((channel, error)) => {
                self.connectivity_failures = if error.is_connectivity() { self.connectivity_failures + 1 } else { 0 };
                record.backend_error = Some(super::BackendFailure { channel, error });
                record.events.push(StepEvent::BackendError);
            }
            Ok(reply) => {
                self.connectivity_failures = 0;
                let parse = parse_command(&reply.text);
                record.llm_raw = Some(reply.text);
                record.llm_latency_ms = reply.latency_ms;
                if let Some(action) = parse.action() {
                    let t = apply_action(&pre, &action, scenario, &self.config.dynamics_noise, &mut self.dynamics_rng);
                    self.history.push(&action);
                    self.state = t.new_state;
                    record.post_state = t.new_state;
                    if t.collided {
                        record.events.push(StepEvent::Collision);
                    } else if t.out_of_bounds {
                        record.events.push(StepEvent::OutOfBounds);
                    } else if goal_reached(&t.new_state, &scenario.target) {
                        record.events.push(StepEvent::GoalReached);
                    }
                }
                record.parse = Some(parse);
            }
        }

        self.outcome = record
            .events
            .iter()
            .find_map(|e| e.terminal_outcome())
            .or_else(|| (self.connectivity_failures >= self.config.max_connectivity_failures.max(1)).then_some(Outcome::Aborted))
            .or_else(|| (k + 1 >= self.config.k_max).then_some(Outcome::Timeout));
        self.records.push(record);
        self.records.last().expect("just pushed")
    }

    pub fn into_trace(self) -> EpisodeTrace {
        EpisodeTrace {
            header: self.header,
            steps_used: self.records.len(),
            records: self.records,
            outcome: self.outcome.unwrap_or(Outcome::Timeout),
        }
    }
}

/// Runs one episode from takeoff to a terminal event.
pub fn run_episode(
    scenario: &Scenario,
    llm: Backend,
    vlm: VlmChannel,
    config: &EpisodeConfig,
    episode_seed: u64,
) -> Result<EpisodeTrace, ScenarioError> {
    let mut runner = EpisodeRunner::new(scenario, llm, vlm, config, episode_seed)?;
    while runner.outcome().is_none() {
        runner.step();
    }
    Ok(runner.into_trace())
}
