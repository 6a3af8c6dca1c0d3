//! Arena geometry, coordinate frames, scenario generation and the spatial
//! predicates the episode loop evaluates after every transition.

mod frame;
mod geometry;
mod grid;
mod scenario;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use frame::{enu_to_ned, ned_to_enu, FrameError, NedPose};
pub use geometry::{
    point_rect_distance, point_segment_distance, rect_rect_distance, segment_intersects_rect,
    segment_rect_distance, sin_cos_deg, Point2, Rect,
};
pub use grid::{rasterize, Cell, OccupancyGrid, DEFAULT_CELL_SIZE};
pub use scenario::{generate_scenario, Scenario, ScenarioConfig, ScenarioError, MAX_PLACEMENT_ATTEMPTS};

/// Vehicle wingspan in meters.
pub const WINGSPAN: f64 = 0.56;
/// Radius of the disc used as the vehicle collision body.
pub const VEHICLE_RADIUS: f64 = WINGSPAN / 2.0;
pub const OBSTACLE_HEIGHT: f64 = 1.5;
/// Held altitude after takeoff.
pub const FLIGHT_ALTITUDE: f64 = 1.0;
/// Success radius around the target, measured in the horizontal plane.
pub const GOAL_RADIUS: f64 = 0.5;
/// Minimum gap between the target and any obstacle footprint.
pub const TARGET_CLEARANCE: f64 = 1.0;

/// Wraps an angle in degrees into (-180, 180].
pub fn normalize_yaw(deg: f64) -> f64 {
    let a = deg % 360.0;
    if a > 180.0 {
        a - 360.0
    } else if a <= -180.0 {
        a + 360.0
    } else {
        a
    }
}

/// Planar vehicle pose in ENU: `yaw` in degrees, counter-clockwise from +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self { x, y, z, yaw: normalize_yaw(yaw) }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Unit vector along the body-forward axis.
    pub fn forward(&self) -> (f64, f64) {
        let (s, c) = sin_cos_deg(self.yaw);
        (c, s)
    }
}

impl fmt::Display for VehicleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3}, {:.3}, yaw {:.2})", self.x, self.y, self.z, self.yaw)
    }
}

/// Closed axis-aligned flight volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl Default for Boundary {
    /// The 7.0 x 4.5 x 2.2 m netted arena, anchored at the origin.
    fn default() -> Self {
        Self { x_min: 0.0, x_max: 7.0, y_min: 0.0, y_max: 4.5, z_min: 0.0, z_max: 2.2 }
    }
}

impl Boundary {
    pub fn is_valid(&self) -> bool {
        [self.x_min, self.x_max, self.y_min, self.y_max, self.z_min, self.z_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max
            && self.z_min < self.z_max
    }

    pub fn span_x(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn span_y(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains_xy(&self, p: Point2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

pub fn check_bounds(state: &VehicleState, boundary: &Boundary) -> bool {
    boundary.contains_xy(state.position()) && state.z >= boundary.z_min && state.z <= boundary.z_max
}

/// Static box obstacle with a square footprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Point2,
    /// Footprint side length in meters.
    pub side: f64,
    pub height: f64,
}

impl Obstacle {
    pub fn new(center: Point2) -> Self {
        Self { center, side: WINGSPAN, height: OBSTACLE_HEIGHT }
    }

    pub fn footprint(&self) -> Rect {
        Rect::centered(self.center, self.side / 2.0, self.side / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    HumanoidRobot,
    Drone,
    Quadcopter,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 3] = [Self::HumanoidRobot, Self::Drone, Self::Quadcopter];

    /// Noun phrase used in prompts.
    pub fn noun(&self) -> &'static str {
        match self {
            Self::HumanoidRobot => "humanoid robot",
            Self::Drone => "drone",
            Self::Quadcopter => "quadcopter",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "humanoid_robot" | "humanoid robot" => Some(Self::HumanoidRobot),
            "drone" => Some(Self::Drone),
            "quadcopter" => Some(Self::Quadcopter),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub position: Point2,
    pub object_class: ObjectClass,
}

/// Inclusive 2D success test; altitude is ignored.
pub fn goal_reached(state: &VehicleState, target: &Target) -> bool {
    state.position().distance(target.position) <= GOAL_RADIUS
}

/// Does a disc of `vehicle_radius` swept from `p0` to `p1` touch any footprint?
pub fn segment_collides(p0: Point2, p1: Point2, vehicle_radius: f64, obstacles: &[Obstacle]) -> bool {
    obstacles
        .iter()
        .any(|o| segment_rect_distance(p0, p1, &o.footprint()) <= vehicle_radius)
}
