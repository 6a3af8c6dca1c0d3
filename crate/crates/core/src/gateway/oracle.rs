//! Ground-truth pilot that flies the A* route using only legal primitives.
//! It validates the closed loop independently of any language model.

use thiserror::Error;

use crate::eval::{astar_shortest_path, PathError};
use crate::grammar::{Action, MAX_MOVE_M, MAX_TURN_DEG};
use crate::world::{
    normalize_yaw, rasterize, segment_collides, Cell, OccupancyGrid, Point2, Scenario, VehicleState, VEHICLE_RADIUS,
};

/// Heading error tolerated before the pilot turns instead of moving.
pub const ALIGN_TOLERANCE_DEG: f64 = 5.0;

const FINE_GRID_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PilotError {
    #[error("no path exists from the current cell to the target")]
    NoPathExists,
    #[error("vehicle is outside the grid")]
    OffGrid,
}

impl From<PathError> for PilotError {
    fn from(_: PathError) -> Self {
        PilotError::NoPathExists
    }
}

fn safe_segment(a: Point2, b: Point2, scenario: &Scenario) -> bool {
    scenario.boundary.contains_xy(b) && !segment_collides(a, b, VEHICLE_RADIUS, &scenario.obstacles)
}

fn nearest_reachable_free_cell(pos: Point2, scenario: &Scenario, grid: &OccupancyGrid) -> Option<Cell> {
    let mut free: Vec<(f64, Cell)> = grid
        .cells()
        .filter(|&c| grid.is_free(c))
        .map(|c| (pos.distance(grid.cell_center(c)), c))
        .collect();
    free.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    free.into_iter()
        .find(|&(_, c)| safe_segment(pos, grid.cell_center(c), scenario))
        .map(|(_, c)| c)
}

fn plan_route(pos: Point2, scenario: &Scenario, grid: &OccupancyGrid) -> Result<Vec<Point2>, PilotError> {
    let mut start = grid.cell_of(pos).ok_or(PilotError::OffGrid)?;
    if grid.is_occupied(start) {
        // inflation is conservative: a safe position can sit in an occupied cell
        start = nearest_reachable_free_cell(pos, scenario, grid).ok_or(PilotError::NoPathExists)?;
    }
    let goal = grid.cell_of(scenario.target.position).ok_or(PilotError::OffGrid)?;
    let path = astar_shortest_path(grid, start, goal)?;

    let mut route: Vec<Point2> = path.cells.iter().map(|&c| grid.cell_center(c)).collect();
    *route.last_mut().expect("path has at least one cell") = scenario.target.position;
    Ok(route)
}

/// Next command for the pilot.
///
/// Plans on the grid from the current cell (retrying on a finer grid when
/// the coarse one has no path), then aims at the farthest route point
/// reachable in a straight collision-free line (the final route point is
/// the target center itself). Turns when the heading error exceeds
/// [`ALIGN_TOLERANCE_DEG`] or when flying the current heading would not be
/// safe; otherwise moves up to the 3 m limit.
pub fn oracle_pilot_command(state: &VehicleState, scenario: &Scenario, grid: &OccupancyGrid) -> Result<Action, PilotError> {
    let pos = state.position();
    let route = match plan_route(pos, scenario, grid) {
        Err(PilotError::NoPathExists) => {
            // coarse inflation can close gaps the vehicle physically fits through
            let fine = rasterize(scenario, grid.cell_size / FINE_GRID_FACTOR).map_err(|_| PilotError::NoPathExists)?;
            plan_route(pos, scenario, &fine)?
        }
        other => other?,
    };

    let aim = route
        .iter()
        .rev()
        .copied()
        .find(|&p| pos.distance(p) > 1e-9 && safe_segment(pos, p, scenario))
        // own-cell center, or the next route point, is always reachable from a free cell
        .unwrap_or(route[route.len().min(2) - 1]);

    let dx = aim.x - pos.x;
    let dy = aim.y - pos.y;
    let error = normalize_yaw(dy.atan2(dx).to_degrees() - state.yaw);
    let distance = pos.distance(aim).min(MAX_MOVE_M);

    let (fx, fy) = state.forward();
    let landing = Point2::new(pos.x + distance * fx, pos.y + distance * fy);
    let aligned = error.abs() <= ALIGN_TOLERANCE_DEG && (error.abs() < 1e-9 || safe_segment(pos, landing, scenario));
    if aligned {
        Ok(Action::Move { distance })
    } else {
        // positive Turn is clockwise, heading error is counter-clockwise
        Ok(Action::Turn { theta: (-error).clamp(-MAX_TURN_DEG, MAX_TURN_DEG) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{Boundary, ObjectClass, Obstacle, Target};

    fn scenario(target: (f64, f64), obstacles: Vec<Obstacle>) -> Scenario {
        Scenario {
            boundary: Boundary::default(),
            obstacles,
            target: Target { position: Point2::new(target.0, target.1), object_class: ObjectClass::Drone },
            start: VehicleState::new(0.0, 0.0, 0.0, 0.0),
            seed: 0,
        }
    }

    fn command(state: VehicleState, s: &Scenario) -> Action {
        let grid = rasterize(s, 0.25).unwrap();
        oracle_pilot_command(&state, s, &grid).unwrap()
    }

    #[test]
    fn aligned_target_moves() {
        let s = scenario((2.0, 0.0), vec![]);
        assert_eq!(command(VehicleState::new(0.0, 0.0, 1.0, 0.0), &s), Action::Move { distance: 2.0 });
    }

    #[test]
    fn target_to_the_left_turns_negative() {
        let s = scenario((0.0, 2.0), vec![]);
        assert_eq!(command(VehicleState::new(0.0, 0.0, 1.0, 0.0), &s), Action::Turn { theta: -90.0 });
    }

    #[test]
    fn far_target_capped_at_three_meters() {
        let s = scenario((6.0, 0.0), vec![]);
        assert_eq!(command(VehicleState::new(0.0, 0.0, 1.0, 0.0), &s), Action::Move { distance: 3.0 });
    }

    #[test]
    fn behind_target_turns_at_most_ninety() {
        let s = scenario((1.0, 1.0), vec![]);
        let a = command(VehicleState::new(3.0, 1.0, 1.0, 0.0), &s);
        assert!(matches!(a, Action::Turn { theta } if theta.abs() == 90.0), "{a:?}");
    }

    #[test]
    fn obstacle_forces_detour() {
        let s = scenario((5.0, 1.0), vec![Obstacle::new(Point2::new(3.0, 1.0))]);
        let a = command(VehicleState::new(1.0, 1.0, 1.0, 0.0), &s);
        assert!(matches!(a, Action::Turn { .. }), "{a:?}");
    }
}
