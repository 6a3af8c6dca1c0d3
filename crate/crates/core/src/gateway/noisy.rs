use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{canonicalize, Action, MAX_MOVE_M, MAX_TURN_DEG};

/// Replies that fail the command grammar, modelled on the failure modes
/// seen from chatty models: disclaimers, reasoning, markdown, bad ranges.
pub const INVALID_REPLIES: [&str; 8] = [
    "I'm sorry, but as an AI language model I cannot directly control a drone.",
    "<think>The target is ahead of me, so I should move forward.</think>\nMove(1.0);",
    "Sure! Here is the next command: Move(1.5);",
    "```\nTurn(30);\n```",
    "**Move(2.0);**",
    "Move(5.0);",
    "Turn(45 degrees);",
    "move forward 1 meter",
];

/// Emits a valid random command with probability `valid_rate`, otherwise
/// one of [`INVALID_REPLIES`].
#[derive(Debug, Clone)]
pub struct NoisyBackend {
    valid_rate: f64,
    rng: ChaCha8Rng,
}

impl NoisyBackend {
    pub fn new(valid_rate: f64, seed: u64) -> Self {
        Self { valid_rate, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn valid_rate(&self) -> f64 {
        self.valid_rate
    }

    pub fn next_reply(&mut self) -> String {
        if self.rng.gen::<f64>() < self.valid_rate {
            let action = if self.rng.gen_bool(0.5) {
                Action::Turn { theta: self.rng.gen_range(-MAX_TURN_DEG..=MAX_TURN_DEG).round() }
            } else {
                Action::Move { distance: (self.rng.gen_range(-MAX_MOVE_M..=MAX_MOVE_M) * 10.0).round() / 10.0 }
            };
            canonicalize(&action)
        } else {
            INVALID_REPLIES[self.rng.gen_range(0..INVALID_REPLIES.len())].to_string()
        }
    }
}
