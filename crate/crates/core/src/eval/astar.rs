//! 8-connected A* over the occupancy grid with octile costs.
//!
//! Diagonal steps are only taken when both orthogonally adjacent cells are
//! free, so a path never slips between two occupied cells that share a corner.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::{Cell, OccupancyGrid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("no path exists between ({0:?}) and ({1:?})")]
    NoPathExists(Cell, Cell),
    #[error("cell {0:?} is occupied or outside the grid")]
    BlockedEndpoint(Cell),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub cells: Vec<Cell>,
    /// Meters.
    pub length: f64,
}

impl GridPath {
    /// Counts of (orthogonal, diagonal) steps.
    pub fn step_counts(&self) -> (usize, usize) {
        self.cells.windows(2).fold((0, 0), |(o, d), w| {
            if w[0].col != w[1].col && w[0].row != w[1].row {
                (o, d + 1)
            } else {
                (o + 1, d)
            }
        })
    }
}

/// Length of a path made of `orthogonal` and `diagonal` steps.
pub fn octile_length(orthogonal: usize, diagonal: usize, cell_size: f64) -> f64 {
    (orthogonal as f64 + diagonal as f64 * SQRT_2) * cell_size
}

/// Octile distance in meters; the A* heuristic.
pub fn octile_distance(a: Cell, b: Cell, cell_size: f64) -> f64 {
    let dx = a.col.abs_diff(b.col);
    let dy = a.row.abs_diff(b.row);
    octile_length(dx.max(dy) - dx.min(dy), dx.min(dy), cell_size)
}

/// Free neighbours of `cell` with the cost of stepping there, in cell units.
pub fn neighbors(grid: &OccupancyGrid, cell: Cell) -> impl Iterator<Item = (Cell, f64)> + '_ {
    const OFFSETS: [(i64, i64); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
    let free = move |c: i64, r: i64| grid.in_grid(c, r) && grid.is_free(Cell::new(c as usize, r as usize));
    OFFSETS.iter().filter_map(move |&(dc, dr)| {
        let (c, r) = (cell.col as i64 + dc, cell.row as i64 + dr);
        if !free(c, r) {
            return None;
        }
        let diagonal = dc != 0 && dr != 0;
        if diagonal && !(free(cell.col as i64 + dc, cell.row as i64) && free(cell.col as i64, cell.row as i64 + dr)) {
            return None;
        }
        Some((Cell::new(c as usize, r as usize), if diagonal { SQRT_2 } else { 1.0 }))
    })
}

#[derive(PartialEq)]
struct Open {
    f: f64,
    cell: Cell,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (f, cell)
        other.f.total_cmp(&self.f).then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn astar_shortest_path(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Result<GridPath, PathError> {
    for c in [start, goal] {
        if !grid.in_grid(c.col as i64, c.row as i64) || grid.is_occupied(c) {
            return Err(PathError::BlockedEndpoint(c));
        }
    }
    let idx = |c: Cell| c.row * grid.width + c.col;
    let n = grid.width * grid.height;
    let mut g = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<Cell>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    g[idx(start)] = 0.0;
    open.push(Open { f: octile_distance(start, goal, 1.0), cell: start });

    while let Some(Open { cell, .. }) = open.pop() {
        if closed[idx(cell)] {
            continue;
        }
        if cell == goal {
            let mut cells = vec![goal];
            let mut cur = goal;
            while let Some(p) = parent[idx(cur)] {
                cells.push(p);
                cur = p;
            }
            cells.reverse();
            let mut path = GridPath { cells, length: 0.0 };
            let (o, d) = path.step_counts();
            path.length = octile_length(o, d, grid.cell_size);
            return Ok(path);
        }
        closed[idx(cell)] = true;
        let base = g[idx(cell)];
        for (next, cost) in neighbors(grid, cell) {
            let i = idx(next);
            if closed[i] {
                continue;
            }
            let candidate = base + cost;
            if candidate < g[i] {
                g[i] = candidate;
                parent[i] = Some(cell);
                open.push(Open { f: candidate + octile_distance(next, goal, 1.0), cell: next });
            }
        }
    }
    Err(PathError::NoPathExists(start, goal))
}
