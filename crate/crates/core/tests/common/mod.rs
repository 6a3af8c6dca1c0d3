#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use aeroagent::world::{Cell, OccupancyGrid, Point2, Scenario, VEHICLE_RADIUS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cheapest cost from `source` to every cell as (orthogonal, diagonal) step
/// counts, by plain uniform-cost search with no heuristic. The frontier is
/// keyed on `o + d*sqrt(2)` scaled to an integer; distinct step mixes on a
/// 28x18 grid never collide under that key.
pub fn ucs_all(grid: &OccupancyGrid, source: Cell) -> Vec<Option<(usize, usize)>> {
    let (w, h) = (grid.width, grid.height);
    let free = |c: i64, r: i64| c >= 0 && r >= 0 && (c as usize) < w && (r as usize) < h && !grid.is_occupied(Cell::new(c as usize, r as usize));
    let mut best: Vec<Option<(usize, usize)>> = vec![None; w * h];
    if !free(source.col as i64, source.row as i64) {
        return best;
    }
    let key = |o: usize, d: usize| ((o as f64 + d as f64 * std::f64::consts::SQRT_2) * 1048576.0).round() as u64;
    let mut done = vec![false; w * h];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0usize, 0usize, source.col, source.row)));
    best[source.row * w + source.col] = Some((0, 0));
    while let Some(Reverse((_, o, d, c, r))) = heap.pop() {
        let i = r * w + c;
        if done[i] {
            continue;
        }
        done[i] = true;
        for dc in -1i64..=1 {
            for dr in -1i64..=1 {
                if dc == 0 && dr == 0 {
                    continue;
                }
                let (nc, nr) = (c as i64 + dc, r as i64 + dr);
                if !free(nc, nr) {
                    continue;
                }
                let diagonal = dc != 0 && dr != 0;
                if diagonal && !(free(c as i64 + dc, r as i64) && free(c as i64, r as i64 + dr)) {
                    continue;
                }
                let (no, nd) = if diagonal { (o, d + 1) } else { (o + 1, d) };
                let j = nr as usize * w + nc as usize;
                if done[j] {
                    continue;
                }
                if best[j].is_none_or(|(bo, bd)| key(no, nd) < key(bo, bd)) {
                    best[j] = Some((no, nd));
                    heap.push(Reverse((key(no, nd), no, nd, nc as usize, nr as usize)));
                }
            }
        }
    }
    best
}

pub fn ucs_steps(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Option<(usize, usize)> {
    if grid.is_occupied(goal) {
        return None;
    }
    ucs_all(grid, start)[goal.row * grid.width + goal.col]
}

/// Random 28x18 grid with roughly `density` of its cells blocked.
pub fn random_grid(seed: u64, density: f64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = OccupancyGrid::new_free(Point2::new(0.0, 0.0), 0.25, 28, 18);
    for c in g.cells().collect::<Vec<_>>() {
        if rng.gen_bool(density) {
            g.set(c, true);
        }
    }
    g
}

pub fn random_free_cell(grid: &OccupancyGrid, rng: &mut impl Rng) -> Cell {
    loop {
        let c = Cell::new(rng.gen_range(0..grid.width), rng.gen_range(0..grid.height));
        if grid.is_free(c) {
            return c;
        }
    }
}

/// Occupancy decided per cell from corner and edge geometry alone: a cell
/// is occupied when the closest point of the cell square to the footprint
/// square lies within the vehicle radius.
pub fn brute_force_occupied(scenario: &Scenario, cell_size: f64, col: usize, row: usize) -> bool {
    let b = scenario.boundary;
    let (x0, y0) = (b.x_min + col as f64 * cell_size, b.y_min + row as f64 * cell_size);
    let (x1, y1) = (x0 + cell_size, y0 + cell_size);
    scenario.obstacles.iter().any(|o| {
        let h = o.side / 2.0;
        let (ox0, ox1, oy0, oy1) = (o.center.x - h, o.center.x + h, o.center.y - h, o.center.y + h);
        let gap_x = (ox0 - x1).max(x0 - ox1).max(0.0);
        let gap_y = (oy0 - y1).max(y0 - oy1).max(0.0);
        gap_x.hypot(gap_y) <= VEHICLE_RADIUS
    })
}
