//! Stand-in for the vision-language channel: geometric visibility, a noisy
//! binary detector on top of it, and the classifier for raw Yes/No replies.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::{normalize_yaw, segment_collides, Obstacle, Target, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    /// Degrees, centered on the body-forward axis.
    pub horizontal_fov: f64,
    pub max_range: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self { horizontal_fov: 90.0, max_range: 8.0 }
    }
}

impl CameraModel {
    pub fn is_valid(&self) -> bool {
        self.horizontal_fov > 0.0 && self.horizontal_fov <= 180.0 && self.max_range > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "detection", content = "raw")]
pub enum DetectionResult {
    Yes,
    No,
    InvalidResponse(String),
}

impl DetectionResult {
    pub fn is_valid(&self) -> bool {
        !matches!(self, DetectionResult::InvalidResponse(_))
    }

    /// Binary signal for control; non-binary replies count as "not seen".
    pub fn seen(&self) -> bool {
        matches!(self, DetectionResult::Yes)
    }

    /// The reply text a well-behaved model would have produced.
    pub fn to_reply(&self) -> String {
        match self {
            DetectionResult::Yes => "Yes".into(),
            DetectionResult::No => "No".into(),
            DetectionResult::InvalidResponse(raw) => raw.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("detector rates must lie in [0, 1] and invalid_rate + max(fp, fn) must not exceed 1")]
pub struct InvalidNoise;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectorNoise {
    pub false_positive_rate: f64,
    pub false_negative_rate: f64,
    pub invalid_rate: f64,
}

impl DetectorNoise {
    pub fn new(false_positive_rate: f64, false_negative_rate: f64, invalid_rate: f64) -> Result<Self, InvalidNoise> {
        let n = Self { false_positive_rate, false_negative_rate, invalid_rate };
        n.validate().map(|_| n)
    }

    pub fn validate(&self) -> Result<(), InvalidNoise> {
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        let rates = [self.false_positive_rate, self.false_negative_rate, self.invalid_rate];
        if rates.iter().all(|&p| unit(p))
            && self.invalid_rate + self.false_positive_rate.max(self.false_negative_rate) <= 1.0
        {
            Ok(())
        } else {
            Err(InvalidNoise)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.false_positive_rate == 0.0 && self.false_negative_rate == 0.0 && self.invalid_rate == 0.0
    }
}

/// Range, field-of-view and line-of-sight test. The occlusion ray has zero
/// width and is tested against raw (uninflated) footprints.
pub fn visible(state: &VehicleState, target: &Target, obstacles: &[Obstacle], camera: &CameraModel) -> bool {
    let eye = state.position();
    let dx = target.position.x - eye.x;
    let dy = target.position.y - eye.y;
    let range = dx.hypot(dy);
    if range > camera.max_range {
        return false;
    }
    if range > 0.0 {
        let bearing = normalize_yaw(dy.atan2(dx).to_degrees() - state.yaw);
        if bearing.abs() > camera.horizontal_fov / 2.0 {
            return false;
        }
    }
    !segment_collides(eye, target.position, 0.0, obstacles)
}

const NON_BINARY_REPLIES: [&str; 4] = [
    "I'm not sure.",
    "The image appears to show an indoor space with several boxes.",
    "It is difficult to tell from this image.",
    "Possibly, there might be something in the distance.",
];

/// Corrupts the ground truth with the configured rates. One uniform draw
/// per call decides: invalid reply, flipped answer, or the truth.
pub fn simulate_detection<R: Rng + ?Sized>(ground_truth_visible: bool, noise: &DetectorNoise, rng: &mut R) -> DetectionResult {
    if noise.is_zero() {
        return if ground_truth_visible { DetectionResult::Yes } else { DetectionResult::No };
    }
    let u: f64 = rng.gen();
    let flip = if ground_truth_visible { noise.false_negative_rate } else { noise.false_positive_rate };
    let seen = if u < noise.invalid_rate {
        let pick = rng.gen_range(0..NON_BINARY_REPLIES.len());
        return DetectionResult::InvalidResponse(NON_BINARY_REPLIES[pick].to_string());
    } else if u < noise.invalid_rate + flip {
        !ground_truth_visible
    } else {
        ground_truth_visible
    };
    if seen {
        DetectionResult::Yes
    } else {
        DetectionResult::No
    }
}

/// Case-insensitive "yes"/"no" after trimming whitespace and one trailing period.
pub fn parse_vlm_response(raw: &str) -> DetectionResult {
    let t = raw.trim();
    let t = t.strip_suffix('.').unwrap_or(t);
    if t.eq_ignore_ascii_case("yes") {
        DetectionResult::Yes
    } else if t.eq_ignore_ascii_case("no") {
        DetectionResult::No
    } else {
        DetectionResult::InvalidResponse(raw.to_string())
    }
}
