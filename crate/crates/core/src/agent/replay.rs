use super::episode::{EpisodeRunner, VlmChannel};
use super::trace::{EpisodeTrace, Outcome};
use super::Channel;
use crate::gateway::{Backend, GatewayError, ScriptedBackend};
use crate::world::ScenarioError;

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub steps_checked: usize,
    /// First step whose recomputed post-state or events differ from the file.
    pub divergence: Option<usize>,
    pub recorded_outcome: Outcome,
    pub replayed_outcome: Option<Outcome>,
}

impl ReplayReport {
    pub fn matches(&self) -> bool {
        self.divergence.is_none() && self.replayed_outcome == Some(self.recorded_outcome)
    }
}

/// Re-simulates a trace from its recorded raw model outputs.
///
/// The recorded replies (and recorded backend failures) are fed back through
/// scripted backends; dynamics noise is re-drawn from the recorded seed.
pub fn replay_trace(trace: &EpisodeTrace) -> Result<ReplayReport, ScenarioError> {
    let mut vlm = Vec::new();
    let mut llm = Vec::new();
    for r in &trace.records {
        match (&r.backend_error, &r.vlm_raw, &r.llm_raw) {
            (Some(f), _, _) if f.channel == Channel::Vlm => vlm.push(Err(f.error.clone())),
            (Some(f), Some(v), _) => {
                vlm.push(Ok(v.clone()));
                llm.push(Err(f.error.clone()));
            }
            (None, Some(v), Some(l)) => {
                vlm.push(Ok(v.clone()));
                llm.push(Ok(l.clone()));
            }
            // malformed record: make the replay diverge here
            _ => {
                vlm.push(Err(GatewayError::ResponsesExhausted));
            }
        }
    }

    let header = &trace.header;
    let mut runner = EpisodeRunner::new(
        &header.scenario,
        Backend::Scripted(ScriptedBackend::with_outcomes(llm)),
        VlmChannel::Scripted(ScriptedBackend::with_outcomes(vlm)),
        &header.config,
        header.episode_seed,
    )?;

    let mut divergence = None;
    let mut checked = 0;
    for expected in &trace.records {
        if runner.outcome().is_some() {
            divergence = Some(expected.k);
            break;
        }
        let got = runner.step();
        checked += 1;
        let same_state = got.post_state == expected.post_state;
        if !same_state || got.events != expected.events || got.parse != expected.parse {
            divergence = Some(expected.k);
            break;
        }
    }
    if divergence.is_none() && runner.outcome().is_none() {
        divergence = Some(trace.records.len());
    }
    Ok(ReplayReport {
        steps_checked: checked,
        divergence,
        recorded_outcome: trace.outcome,
        replayed_outcome: runner.outcome(),
    })
}
