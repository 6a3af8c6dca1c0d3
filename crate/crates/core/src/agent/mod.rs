//! The perceive-prompt-act loop: one VLM presence query, one LLM command,
//! strict parsing, and the transition, repeated until a terminal event or
//! the step budget runs out.

mod episode;
mod history;
mod prompt;
mod replay;
mod trace;

use serde::{Deserialize, Serialize};

use crate::gateway::GatewayError;

pub use episode::{run_episode, EpisodeConfig, EpisodeRunner, VlmChannel, VlmChannelConfig, DEFAULT_K_MAX};
pub use history::{CommandHistory, DEFAULT_HISTORY_LEN};
pub use prompt::{build_llm_prompt, build_vlm_query, describe_scene, PromptContext, PROMPT_VERSION};
pub use replay::{replay_trace, ReplayReport};
pub use trace::{EpisodeTrace, Outcome, StepEvent, StepRecord, TraceError, TraceHeader};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Vlm,
    Llm,
}

/// A failed backend call recorded in a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendFailure {
    pub channel: Channel,
    pub error: GatewayError,
}
