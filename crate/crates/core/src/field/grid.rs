use crate::geom::{Rect, Vec2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Occupancy of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellState {
    Free,
    Goal,
    Unsafe,
}

/// Grid dimensions in cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    pub width: usize,
    pub height: usize,
}

/// World description: bounds, grid resolution, and static regions.
///
/// This is the `bounds`/`grid`/`obstacles`/`goal` section of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub bounds: Rect,
    pub grid: GridDims,
    #[serde(default)]
    pub obstacles: Vec<Rect>,
    #[serde(default)]
    pub goal: Option<Rect>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum WorldError {
    #[error("world bounds are degenerate or non-finite: {0:?}")]
    BadBounds(Rect),
    #[error("grid must be at least 3x3, got {width}x{height}")]
    GridTooSmall { width: usize, height: usize },
    #[error("obstacle {index} lies outside the world bounds")]
    ObstacleOutOfBounds { index: usize },
    #[error("goal rectangle lies outside the world bounds")]
    GoalOutOfBounds,
}

impl WorldSpec {
    pub fn validate(&self) -> Result<(), WorldError> {
        if !self.bounds.is_valid()
            || self.bounds.x_min >= self.bounds.x_max
            || self.bounds.y_min >= self.bounds.y_max
        {
            return Err(WorldError::BadBounds(self.bounds));
        }
        if self.grid.width < 3 || self.grid.height < 3 {
            return Err(WorldError::GridTooSmall {
                width: self.grid.width,
                height: self.grid.height,
            });
        }
        let inside = |r: &Rect| {
            r.is_valid()
                && r.x_min >= self.bounds.x_min
                && r.x_max <= self.bounds.x_max
                && r.y_min >= self.bounds.y_min
                && r.y_max <= self.bounds.y_max
        };
        for (index, r) in self.obstacles.iter().enumerate() {
            if !inside(r) {
                return Err(WorldError::ObstacleOutOfBounds { index });
            }
        }
        if let Some(g) = &self.goal {
            if !inside(g) {
                return Err(WorldError::GoalOutOfBounds);
            }
        }
        Ok(())
    }

    pub fn transform(&self) -> GridTransform {
        GridTransform { bounds: self.bounds, dims: self.grid }
    }

    /// Occupancy from the static regions alone: goal rectangle, obstacles,
    /// and a closed border, with unsafe overruling goal.
    pub fn static_occupancy(&self) -> OccupancyGrid {
        let mut occ = OccupancyGrid::free(self.transform());
        if let Some(g) = &self.goal {
            occ.mark_rect(g, CellState::Goal);
        }
        for r in &self.obstacles {
            occ.mark_rect(r, CellState::Unsafe);
        }
        occ.close_border();
        occ
    }
}

/// Affine map between world coordinates and (fractional) grid indices.
///
/// Grid point `(i, j)` sits at world
/// `(x_min + i * dx, y_min + j * dy)` with `dx = (x_max - x_min) / (W - 1)`,
/// so `i = 0` is the left edge and `i = W - 1` the right edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridTransform {
    pub bounds: Rect,
    pub dims: GridDims,
}

impl GridTransform {
    /// World cell size `(dx, dy)`: the spacing between grid points.
    pub fn cell_size(&self) -> (f64, f64) {
        (
            (self.bounds.x_max - self.bounds.x_min) / (self.dims.width - 1) as f64,
            (self.bounds.y_max - self.bounds.y_min) / (self.dims.height - 1) as f64,
        )
    }

    pub fn world_to_grid(&self, p: Vec2) -> (f64, f64) {
        let i = (p.x - self.bounds.x_min) / (self.bounds.x_max - self.bounds.x_min)
            * (self.dims.width - 1) as f64;
        let j = (p.y - self.bounds.y_min) / (self.bounds.y_max - self.bounds.y_min)
            * (self.dims.height - 1) as f64;
        (i, j)
    }

    pub fn grid_to_world(&self, i: f64, j: f64) -> Vec2 {
        let (dx, dy) = self.cell_size();
        Vec2::new(self.bounds.x_min + i * dx, self.bounds.y_min + j * dy)
    }

    /// Center of cell `(i, j)` in world coordinates.
    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        self.grid_to_world(i as f64, j as f64)
    }

    /// Nearest cell to a world point, clamped into the grid.
    pub fn nearest_cell(&self, p: Vec2) -> (usize, usize) {
        let (gi, gj) = self.world_to_grid(p);
        let i = gi.round().clamp(0.0, (self.dims.width - 1) as f64) as usize;
        let j = gj.round().clamp(0.0, (self.dims.height - 1) as f64) as usize;
        (i, j)
    }
}

/// A grid of cell states with its world transform. Cells are stored
/// row-major: index `j * width + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    transform: GridTransform,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    /// All-free grid for a transform.
    pub fn free(transform: GridTransform) -> Self {
        let n = transform.dims.width * transform.dims.height;
        Self { transform, cells: vec![CellState::Free; n] }
    }

    pub fn transform(&self) -> &GridTransform {
        &self.transform
    }

    pub fn width(&self) -> usize {
        self.transform.dims.width
    }

    pub fn height(&self) -> usize {
        self.transform.dims.height
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.width() && j < self.height());
        j * self.width() + i
    }

    pub fn get(&self, i: usize, j: usize) -> CellState {
        self.cells[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, state: CellState) {
        let idx = self.index(i, j);
        self.cells[idx] = state;
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    /// State of the cell nearest to a world point (out-of-bounds points
    /// clamp to border cells).
    pub fn state_at_world(&self, p: Vec2) -> CellState {
        let (i, j) = self.transform.nearest_cell(p);
        self.get(i, j)
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|&&c| c == state).count()
    }

    /// Is `(i, j)` on the outermost ring of the grid?
    pub fn is_border(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.width() - 1 || j == self.height() - 1
    }

    /// Mark every border cell unsafe.
    pub fn close_border(&mut self) {
        let (w, h) = (self.width(), self.height());
        for i in 0..w {
            self.set(i, 0, CellState::Unsafe);
            self.set(i, h - 1, CellState::Unsafe);
        }
        for j in 0..h {
            self.set(0, j, CellState::Unsafe);
            self.set(w - 1, j, CellState::Unsafe);
        }
    }

    /// Mark all cells whose center lies in `rect`.
    pub fn mark_rect(&mut self, rect: &Rect, state: CellState) {
        let (w, h) = (self.width(), self.height());
        for j in 0..h {
            for i in 0..w {
                if rect.contains(self.transform.cell_center(i, j)) {
                    self.set(i, j, state);
                }
            }
        }
    }

    /// Compact byte encoding of dims + states; identical grids (and only
    /// identical grids) share a key. Used to deduplicate per-epoch solves.
    pub fn structural_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(self.cells.len() + 16);
        key.extend_from_slice(&(self.width() as u64).to_le_bytes());
        key.extend_from_slice(&(self.height() as u64).to_le_bytes());
        key.extend(self.cells.iter().map(|c| match c {
            CellState::Free => 0u8,
            CellState::Goal => 1u8,
            CellState::Unsafe => 2u8,
        }));
        key
    }

    /// World centers and flat indices of all unsafe cells, in index order.
    pub fn unsafe_cell_centers(&self) -> Vec<(Vec2, usize)> {
        let mut out = Vec::new();
        for j in 0..self.height() {
            for i in 0..self.width() {
                if self.get(i, j) == CellState::Unsafe {
                    out.push((self.transform.cell_center(i, j), self.index(i, j)));
                }
            }
        }
        out
    }
}
