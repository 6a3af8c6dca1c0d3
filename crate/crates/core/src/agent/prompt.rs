//! Prompt text. Every byte here is part of the experiment, so the wording is
//! versioned: any edit must bump [`PROMPT_VERSION`].

use serde::{Deserialize, Serialize};

use super::CommandHistory;
use crate::perception::DetectionResult;
use crate::world::{ObjectClass, Scenario, VehicleState};

pub const PROMPT_VERSION: &str = "1";

const LLM_SYSTEM_PROMPT: &str = "You are the flight controller of a quadcopter flying at a fixed altitude inside a bounded indoor area.\n\
Reply with exactly one command and nothing else. The only allowed commands are:\n\
Turn(<degrees>); rotate in place; degrees between -90 and 90; negative turns left (counter-clockwise), positive turns right (clockwise).\n\
Move(<meters>); fly straight along the current heading; meters between -3.0 and 3.0; negative flies backward.\n\
Use plain decimal numbers. Do not explain, do not reason step by step, do not use markdown, symbols or any other text.";

const VLM_SYSTEM_PROMPT: &str = "You inspect images from a drone camera. Answer with a single word: Yes or No. Do not add any other text.";

/// System and user prompt for the binary presence query.
pub fn build_vlm_query(object_class: ObjectClass) -> (String, String) {
    (
        VLM_SYSTEM_PROMPT.to_string(),
        format!("Is there a {} in the image? Answer Yes or No.", object_class.noun()),
    )
}

/// Task context for one step, rendered deterministically from ground state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptContext {
    pub mission_text: String,
    pub state_metadata: String,
    pub environmental_cues: String,
    pub detection_line: String,
}

impl PromptContext {
    pub fn new(state: &VehicleState, scenario: &Scenario, detection: &DetectionResult, reveal_obstacles: bool) -> Self {
        let t = &scenario.target;
        let b = &scenario.boundary;
        let mission_text = format!(
            "Mission: find the {noun} and fly to within 0.5 meters of it. The {noun} is located at x={:.2}, y={:.2} meters.",
            t.position.x,
            t.position.y,
            noun = t.object_class.noun(),
        );
        let state_metadata = format!(
            "Current position: x={:.2}, y={:.2} meters. Current heading: {:.2} degrees (0 faces +x, 90 faces +y).",
            state.x, state.y, state.yaw
        );
        let mut environmental_cues = format!(
            "Operational boundary: x from {:.2} to {:.2} meters, y from {:.2} to {:.2} meters. Leaving it fails the mission.",
            b.x_min, b.x_max, b.y_min, b.y_max
        );
        if reveal_obstacles {
            if scenario.obstacles.is_empty() {
                environmental_cues.push_str(" Known obstacles: none.");
            } else {
                let list: Vec<String> = scenario
                    .obstacles
                    .iter()
                    .map(|o| format!("({:.2}, {:.2})", o.center.x, o.center.y))
                    .collect();
                environmental_cues.push_str(&format!(
                    " Known obstacles ({:.2} m boxes) centered at: {}.",
                    scenario.obstacles[0].side,
                    list.join(", ")
                ));
            }
        }
        let detection_line = format!("Target visible: {}", if detection.seen() { "Yes" } else { "No" });
        Self { mission_text, state_metadata, environmental_cues, detection_line }
    }
}

/// System prompt plus the three user messages: mission, situation, history.
pub fn build_llm_prompt(context: &PromptContext, history: &CommandHistory) -> (String, Vec<String>) {
    let situation = format!("{}\n{}\n{}", context.state_metadata, context.environmental_cues, context.detection_line);
    let recent = if history.is_empty() {
        "Recent valid commands: (none)".to_string()
    } else {
        let mut s = String::from("Recent valid commands:");
        for entry in history.entries() {
            s.push('\n');
            s.push_str(entry);
        }
        s
    };
    (LLM_SYSTEM_PROMPT.to_string(), vec![context.mission_text.clone(), situation, recent])
}

/// Text stand-in for a camera frame, sent to a remote vision model when no
/// renderer is available. Not a faithful substitute for pixels.
pub fn describe_scene(state: &VehicleState, scenario: &Scenario, target_visible: bool) -> String {
    let mut s = format!(
        "Image description (text rendering, no pixels): indoor netted area seen from a drone at {:.1} m altitude.",
        state.z
    );
    if target_visible {
        let d = state.position().distance(scenario.target.position);
        s.push_str(&format!(" A {} stands about {:.1} meters ahead.", scenario.target.object_class.noun(), d));
    } else {
        s.push_str(" Cardboard boxes and netting are in view.");
    }
    s
}
