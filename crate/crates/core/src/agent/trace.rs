//! Episode traces and their JSON Lines encoding.
//!
//! Layout: one `header` line, one `step` line per inference step, one
//! closing `outcome` line. Floats are written in shortest round-trip form
//! so decoding and re-encoding reproduces the file byte for byte.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::episode::EpisodeConfig;
use super::BackendFailure;
use crate::grammar::ParseResult;
use crate::perception::DetectionResult;
use crate::world::{Scenario, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepEvent {
    Collision,
    OutOfBounds,
    GoalReached,
    BackendError,
}

impl StepEvent {
    pub fn terminal_outcome(&self) -> Option<Outcome> {
        match self {
            StepEvent::Collision => Some(Outcome::Collision),
            StepEvent::OutOfBounds => Some(Outcome::OutOfBounds),
            StepEvent::GoalReached => Some(Outcome::Success),
            StepEvent::BackendError => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Success,
    Collision,
    OutOfBounds,
    Timeout,
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    pub pre_state: VehicleState,
    /// Geometric ground truth, before any detector corruption.
    pub target_visible: bool,
    pub vlm_raw: Option<String>,
    pub detection: Option<DetectionResult>,
    pub llm_system: String,
    pub llm_users: Vec<String>,
    pub llm_raw: Option<String>,
    pub llm_latency_ms: f64,
    pub parse: Option<ParseResult>,
    pub backend_error: Option<BackendFailure>,
    pub post_state: VehicleState,
    pub events: Vec<StepEvent>,
}

impl StepRecord {
    pub fn is_valid_command(&self) -> bool {
        self.parse.as_ref().is_some_and(ParseResult::is_valid)
    }

    /// A step whose LLM call returned text (valid or not).
    pub fn completed(&self) -> bool {
        self.llm_raw.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub prompt_version: String,
    pub episode_index: usize,
    pub episode_seed: u64,
    pub llm_backend: String,
    pub vlm_channel: String,
    pub scenario: Scenario,
    pub config: EpisodeConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub header: TraceHeader,
    pub records: Vec<StepRecord>,
    pub outcome: Outcome,
    pub steps_used: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header(TraceHeader),
    Step(StepRecord),
    Outcome { outcome: Outcome, steps_used: usize },
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace i/o: {0}")]
    Io(#[from] io::Error),
    #[error("trace line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("trace structure: {0}")]
    Structure(String),
}

impl EpisodeTrace {
    pub fn is_success(&self) -> bool {
        self.outcome == Outcome::Success
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: &Line| {
            out.push_str(&serde_json::to_string(line).expect("trace serializes"));
            out.push('\n');
        };
        push(&Line::Header(self.header.clone()));
        for r in &self.records {
            push(&Line::Step(r.clone()));
        }
        push(&Line::Outcome { outcome: self.outcome, steps_used: self.steps_used });
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        let mut header = None;
        let mut records = Vec::new();
        let mut closing = None;
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            if closing.is_some() {
                return Err(TraceError::Structure(format!("content after outcome line at line {}", i + 1)));
            }
            let line: Line = serde_json::from_str(raw).map_err(|e| TraceError::Parse { line: i + 1, message: e.to_string() })?;
            match line {
                Line::Header(h) if header.is_none() && records.is_empty() => header = Some(h),
                Line::Header(_) => return Err(TraceError::Structure(format!("unexpected header at line {}", i + 1))),
                Line::Step(r) => {
                    if header.is_none() {
                        return Err(TraceError::Structure("step before header".into()));
                    }
                    if r.k != records.len() {
                        return Err(TraceError::Structure(format!("step index {} out of sequence at line {}", r.k, i + 1)));
                    }
                    records.push(r);
                }
                Line::Outcome { outcome, steps_used } => closing = Some((outcome, steps_used)),
            }
        }
        let header = header.ok_or_else(|| TraceError::Structure("missing header".into()))?;
        let (outcome, steps_used) = closing.ok_or_else(|| TraceError::Structure("missing outcome line (truncated trace?)".into()))?;
        if steps_used != records.len() {
            return Err(TraceError::Structure(format!("steps_used {steps_used} but {} step lines", records.len())));
        }
        Ok(Self { header, records, outcome, steps_used })
    }

    pub fn read(path: &Path) -> Result<Self, TraceError> {
        Self::from_jsonl(&fs::read_to_string(path)?)
    }

    /// Writes through a temporary sibling and renames, so a half-written
    /// file never looks like a finished trace.
    pub fn write(&self, path: &Path) -> Result<(), TraceError> {
        let tmp = path.with_extension("jsonl.partial");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.to_jsonl().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}
