use serde::{Deserialize, Serialize};

use super::{rect_rect_distance, Point2, Rect, Scenario, ScenarioError, VEHICLE_RADIUS};

pub const DEFAULT_CELL_SIZE: f64 = 0.25;

/// Grid cell index; `col` runs along +x, `row` along +y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub col: usize,
    pub row: usize,
}

impl Cell {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// Boolean occupancy raster of the arena. A cell is occupied when its
/// square touches some obstacle footprint inflated by the vehicle radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub cell_size: f64,
    pub width: usize,
    pub height: usize,
    pub origin: Point2,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new_free(origin: Point2, cell_size: f64, width: usize, height: usize) -> Self {
        Self { cell_size, width, height, origin, cells: vec![false; width * height] }
    }

    pub fn is_occupied(&self, cell: Cell) -> bool {
        self.cells[cell.row * self.width + cell.col]
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        !self.is_occupied(cell)
    }

    pub fn set(&mut self, cell: Cell, occupied: bool) {
        self.cells[cell.row * self.width + cell.col] = occupied;
    }

    pub fn in_grid(&self, col: i64, row: i64) -> bool {
        col >= 0 && row >= 0 && (col as usize) < self.width && (row as usize) < self.height
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |row| (0..self.width).map(move |col| Cell::new(col, row)))
    }

    pub fn cell_rect(&self, cell: Cell) -> Rect {
        let min = Point2::new(
            self.origin.x + cell.col as f64 * self.cell_size,
            self.origin.y + cell.row as f64 * self.cell_size,
        );
        Rect { min, max: Point2::new(min.x + self.cell_size, min.y + self.cell_size) }
    }

    pub fn cell_center(&self, cell: Cell) -> Point2 {
        Point2::new(
            self.origin.x + (cell.col as f64 + 0.5) * self.cell_size,
            self.origin.y + (cell.row as f64 + 0.5) * self.cell_size,
        )
    }

    /// Cell containing `p`; points on the far arena edge map to the last cell.
    pub fn cell_of(&self, p: Point2) -> Option<Cell> {
        let fx = ((p.x - self.origin.x) / self.cell_size).floor();
        let fy = ((p.y - self.origin.y) / self.cell_size).floor();
        if !fx.is_finite() || !fy.is_finite() || fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (mut col, mut row) = (fx as usize, fy as usize);
        let far_x = self.origin.x + self.width as f64 * self.cell_size;
        let far_y = self.origin.y + self.height as f64 * self.cell_size;
        if col == self.width && p.x <= far_x {
            col -= 1;
        }
        if row == self.height && p.y <= far_y {
            row -= 1;
        }
        (col < self.width && row < self.height).then_some(Cell::new(col, row))
    }

    /// Plain-text PGM (P2). Free cells are white, occupied black, top row is +y.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n1\n", self.width, self.height);
        for row in (0..self.height).rev() {
            let line: Vec<&str> = (0..self.width)
                .map(|col| if self.is_occupied(Cell::new(col, row)) { "0" } else { "1" })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn cell_count(span: f64, cell_size: f64) -> usize {
    // tolerate representation error so 7.0 / 0.1 does not round up to 71
    ((span / cell_size) - 1e-9).ceil().max(1.0) as usize
}

pub fn rasterize(scenario: &Scenario, cell_size: f64) -> Result<OccupancyGrid, ScenarioError> {
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(ScenarioError::InvalidConfig(format!("cell size must be positive, got {cell_size}")));
    }
    let b = &scenario.boundary;
    let origin = Point2::new(b.x_min, b.y_min);
    let mut grid = OccupancyGrid::new_free(origin, cell_size, cell_count(b.span_x(), cell_size), cell_count(b.span_y(), cell_size));
    let footprints: Vec<Rect> = scenario.obstacles.iter().map(|o| o.footprint()).collect();
    let all: Vec<Cell> = grid.cells().collect();
    for cell in all {
        let r = grid.cell_rect(cell);
        if footprints.iter().any(|fp| rect_rect_distance(&r, fp) <= VEHICLE_RADIUS) {
            grid.set(cell, true);
        }
    }
    for (what, p) in [("start", scenario.start.position()), ("target", scenario.target.position)] {
        match grid.cell_of(p) {
            Some(c) if grid.is_free(c) => {}
            Some(c) => {
                return Err(ScenarioError::Infeasible(format!("{what} cell ({}, {}) is occupied", c.col, c.row)))
            }
            None => return Err(ScenarioError::Infeasible(format!("{what} lies outside the grid"))),
        }
    }
    Ok(grid)
}
