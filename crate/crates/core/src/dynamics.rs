//! Discrete-time stand-in for the autopilot: one motion primitive per step,
//! applied as an instantaneous kinematic jump with optional actuation noise.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::grammar::Action;
use crate::world::{
    check_bounds, normalize_yaw, segment_collides, Point2, Scenario, VehicleState, FLIGHT_ALTITUDE,
    VEHICLE_RADIUS,
};

/// Additive Gaussian error on the commanded magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub yaw_sigma: f64,
    pub dist_sigma: f64,
    pub enabled: bool,
}

impl NoiseConfig {
    pub const fn disabled() -> Self {
        Self { yaw_sigma: 2.0, dist_sigma: 0.05, enabled: false }
    }

    pub const fn enabled() -> Self {
        Self { yaw_sigma: 2.0, dist_sigma: 0.05, enabled: true }
    }

    pub fn is_valid(&self) -> bool {
        self.yaw_sigma >= 0.0 && self.dist_sigma >= 0.0 && self.yaw_sigma.is_finite() && self.dist_sigma.is_finite()
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::disabled()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub new_state: VehicleState,
    pub collided: bool,
    pub out_of_bounds: bool,
    pub path_segment: (Point2, Point2),
}

fn draw<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma).expect("sigma validated").sample(rng)
}

/// Applies one already range-checked action.
///
/// `Turn(theta)` yaws clockwise for positive `theta`, so in the CCW-positive
/// frame the heading becomes `yaw - theta`. `Move(d)` translates along the
/// current body-forward axis. Collision and bounds are judged on the swept
/// segment; the endpoint is reported either way.
pub fn apply_action<R: Rng + ?Sized>(
    state: &VehicleState,
    action: &Action,
    scenario: &Scenario,
    noise: &NoiseConfig,
    rng: &mut R,
) -> TransitionResult {
    let start = state.position();
    match *action {
        Action::Turn { theta } => {
            let eps = if noise.enabled { draw(noise.yaw_sigma, rng) } else { 0.0 };
            let new_state = VehicleState { yaw: normalize_yaw(state.yaw - theta + eps), ..*state };
            TransitionResult {
                new_state,
                collided: false,
                out_of_bounds: !check_bounds(&new_state, &scenario.boundary),
                path_segment: (start, start),
            }
        }
        Action::Move { distance } => {
            let eps = if noise.enabled { draw(noise.dist_sigma, rng) } else { 0.0 };
            let d = distance + eps;
            let (fx, fy) = state.forward();
            let new_state = VehicleState { x: state.x + d * fx, y: state.y + d * fy, ..*state };
            let end = new_state.position();
            TransitionResult {
                new_state,
                collided: segment_collides(start, end, VEHICLE_RADIUS, &scenario.obstacles),
                out_of_bounds: !check_bounds(&new_state, &scenario.boundary),
                path_segment: (start, end),
            }
        }
    }
}

/// Offboard switch and climb, collapsed into one instantaneous step.
pub fn takeoff(scenario: &Scenario) -> VehicleState {
    VehicleState { z: FLIGHT_ALTITUDE, ..scenario.start }
}
