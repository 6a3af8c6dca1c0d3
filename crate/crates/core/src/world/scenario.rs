use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    check_bounds, point_rect_distance, rect_rect_distance, Boundary, ObjectClass, Obstacle, Point2,
    Target, VehicleState, GOAL_RADIUS, TARGET_CLEARANCE, WINGSPAN,
};

/// Rejection-sampling budget per placed entity.
pub const MAX_PLACEMENT_ATTEMPTS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("scenario infeasible: {0}")]
    Infeasible(String),
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub obstacle_count: usize,
    pub boundary: Boundary,
    pub object_class: ObjectClass,
    pub seed: u64,
    /// Shared by every episode of a run.
    pub start: VehicleState,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            obstacle_count: 5,
            boundary: Boundary::default(),
            object_class: ObjectClass::Drone,
            seed: 0,
            start: VehicleState::new(0.5, 0.5, 0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub boundary: Boundary,
    pub obstacles: Vec<Obstacle>,
    pub target: Target,
    pub start: VehicleState,
    pub seed: u64,
}

impl Scenario {
    /// Re-checks every placement rule; used for scenarios loaded from disk.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let b = &self.boundary;
        if !b.is_valid() {
            return Err(ScenarioError::InvalidConfig("boundary extents must satisfy min < max".into()));
        }
        let start = self.start.position();
        if !b.contains_xy(start) {
            return Err(ScenarioError::Infeasible("start outside boundary".into()));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            let fp = o.footprint();
            if fp.min.x < b.x_min || fp.max.x > b.x_max || fp.min.y < b.y_min || fp.max.y > b.y_max {
                return Err(ScenarioError::Infeasible(format!("obstacle {i} leaves the boundary")));
            }
            if point_rect_distance(self.target.position, &fp) < TARGET_CLEARANCE {
                return Err(ScenarioError::Infeasible(format!("obstacle {i} closer than clearance to target")));
            }
            if point_rect_distance(start, &fp) < TARGET_CLEARANCE {
                return Err(ScenarioError::Infeasible(format!("obstacle {i} closer than clearance to start")));
            }
        }
        if !b.contains_xy(self.target.position) {
            return Err(ScenarioError::Infeasible("target outside boundary".into()));
        }
        if self.target.position.distance(start) <= GOAL_RADIUS {
            return Err(ScenarioError::Infeasible("target within goal radius of start".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }
}

fn sample_point(rng: &mut ChaCha8Rng, x: (f64, f64), y: (f64, f64)) -> Point2 {
    Point2::new(rng.gen_range(x.0..=x.1), rng.gen_range(y.0..=y.1))
}

/// Draws obstacles, then the target, uniformly inside the boundary by
/// rejection sampling. The same config always yields the same scenario.
///
/// Obstacles keep [`TARGET_CLEARANCE`] from each other and from the start
/// point; the target keeps it from every obstacle footprint and sits farther
/// than the goal radius from the start.
pub fn generate_scenario(config: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    let b = config.boundary;
    if !b.is_valid() {
        return Err(ScenarioError::InvalidConfig("boundary extents must satisfy min < max".into()));
    }
    let half = WINGSPAN / 2.0;
    if b.span_x() < WINGSPAN || b.span_y() < WINGSPAN {
        return Err(ScenarioError::InvalidConfig("boundary smaller than one obstacle".into()));
    }
    let start = config.start;
    if !check_bounds(&VehicleState { z: b.z_min, ..start }, &b) {
        return Err(ScenarioError::InvalidConfig("start outside boundary".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut obstacles: Vec<Obstacle> = Vec::with_capacity(config.obstacle_count);
    for i in 0..config.obstacle_count {
        let placed = (0..MAX_PLACEMENT_ATTEMPTS).find_map(|_| {
            let c = sample_point(&mut rng, (b.x_min + half, b.x_max - half), (b.y_min + half, b.y_max - half));
            let candidate = Obstacle::new(c);
            let fp = candidate.footprint();
            let clear_of_start = point_rect_distance(start.position(), &fp) >= TARGET_CLEARANCE;
            let clear_of_others = obstacles
                .iter()
                .all(|o| rect_rect_distance(&o.footprint(), &fp) >= TARGET_CLEARANCE);
            (clear_of_start && clear_of_others).then_some(candidate)
        });
        match placed {
            Some(o) => obstacles.push(o),
            None => {
                return Err(ScenarioError::Infeasible(format!(
                    "could not place obstacle {i} after {MAX_PLACEMENT_ATTEMPTS} attempts"
                )))
            }
        }
    }

    let position = (0..MAX_PLACEMENT_ATTEMPTS)
        .find_map(|_| {
            let p = sample_point(&mut rng, (b.x_min, b.x_max), (b.y_min, b.y_max));
            let clear = obstacles
                .iter()
                .all(|o| point_rect_distance(p, &o.footprint()) >= TARGET_CLEARANCE);
            (clear && p.distance(start.position()) > GOAL_RADIUS).then_some(p)
        })
        .ok_or_else(|| {
            ScenarioError::Infeasible(format!("could not place target after {MAX_PLACEMENT_ATTEMPTS} attempts"))
        })?;

    Ok(Scenario {
        boundary: b,
        obstacles,
        target: Target { position, object_class: config.object_class },
        start,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(obstacle_count: usize, seed: u64) -> ScenarioConfig {
        ScenarioConfig { obstacle_count, seed, ..Default::default() }
    }

    #[test]
    fn empty_scenario_has_valid_target() {
        for seed in 0..20 {
            let s = generate_scenario(&config(0, seed)).unwrap();
            assert!(s.obstacles.is_empty());
            s.validate().unwrap();
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate_scenario(&config(5, 42)).unwrap();
        let b = generate_scenario(&config(5, 42)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = generate_scenario(&config(5, 43)).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn overcrowded_arena_is_infeasible() {
        let err = generate_scenario(&config(60, 1)).unwrap_err();
        assert!(matches!(err, ScenarioError::Infeasible(_)), "{err}");
    }

    #[test]
    fn rejects_degenerate_boundary() {
        let mut c = config(0, 1);
        c.boundary.x_max = c.boundary.x_min;
        assert!(matches!(generate_scenario(&c), Err(ScenarioError::InvalidConfig(_))));
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let s = generate_scenario(&config(5, 9)).unwrap();
        let back: Scenario = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
}
