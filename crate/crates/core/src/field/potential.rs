use super::grid::{CellState, GridTransform, OccupancyGrid};
use super::solver::SolveStats;
use crate::geom::Vec2;

/// Gradient magnitudes below this are treated as numerically flat.
/// Harmonic fields through narrow passages decay steeply enough that 64-bit
/// values far from the goal can underflow to a constant.
pub const FLAT_GRAD_EPS: f64 = 1e-12;

/// Interpolated potential and gradient at a world point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub v: f64,
    pub grad: Vec2,
    /// The query point was outside the world and was clamped to the boundary.
    pub clamped: bool,
    /// `|grad| < FLAT_GRAD_EPS` while `0 < v < 1`: the descent direction is
    /// numerically undefined here.
    pub flat: bool,
}

/// A solved potential field: `V` on the grid (0 on goal cells, 1 on unsafe
/// cells), its finite-difference gradient, and the occupancy it was solved
/// on. Immutable once built; freely shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    occupancy: OccupancyGrid,
    v: Vec<f64>,
    grad: Vec<Vec2>,
    stats: SolveStats,
}

impl PotentialField {
    pub(crate) fn new(
        occupancy: OccupancyGrid,
        v: Vec<f64>,
        grad: Vec<Vec2>,
        stats: SolveStats,
    ) -> Self {
        debug_assert_eq!(v.len(), occupancy.cells().len());
        debug_assert_eq!(grad.len(), v.len());
        Self { occupancy, v, grad, stats }
    }

    pub fn occupancy(&self) -> &OccupancyGrid {
        &self.occupancy
    }

    pub fn transform(&self) -> &GridTransform {
        self.occupancy.transform()
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn gradients(&self) -> &[Vec2] {
        &self.grad
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn v_at(&self, i: usize, j: usize) -> f64 {
        self.v[self.occupancy.index(i, j)]
    }

    pub fn grad_at(&self, i: usize, j: usize) -> Vec2 {
        self.grad[self.occupancy.index(i, j)]
    }

    /// Largest deviation of any free cell from the mean of its four
    /// neighbors; the fixed-point residual of the solve.
    pub fn max_harmonic_residual(&self) -> f64 {
        let w = self.occupancy.width();
        let mut worst = 0.0f64;
        for (idx, &state) in self.occupancy.cells().iter().enumerate() {
            if state != CellState::Free {
                continue;
            }
            let mean =
                0.25 * (self.v[idx - 1] + self.v[idx + 1] + self.v[idx - w] + self.v[idx + w]);
            worst = worst.max((self.v[idx] - mean).abs());
        }
        worst
    }

    /// Bilinear interpolation of `V` and of each precomputed gradient
    /// component at a world point. Out-of-bounds queries clamp to the grid
    /// edge and come back flagged.
    pub fn sample(&self, p: Vec2) -> FieldSample {
        let dims = self.transform().dims;
        let (gi, gj) = self.transform().world_to_grid(p);
        let max_i = (dims.width - 1) as f64;
        let max_j = (dims.height - 1) as f64;
        let clamped = !(0.0..=max_i).contains(&gi) || !(0.0..=max_j).contains(&gj);
        let gi = gi.clamp(0.0, max_i);
        let gj = gj.clamp(0.0, max_j);

        // Patch origin; at the top edges step back one cell so the
        // interpolation square stays inside the grid.
        let i0 = (gi.floor() as usize).min(dims.width - 2);
        let j0 = (gj.floor() as usize).min(dims.height - 2);
        let fx = gi - i0 as f64;
        let fy = gj - j0 as f64;

        let w = dims.width;
        let idx = j0 * w + i0;
        let lerp2 = |v00: f64, v10: f64, v01: f64, v11: f64| {
            let a = v00 + (v10 - v00) * fx;
            let b = v01 + (v11 - v01) * fx;
            a + (b - a) * fy
        };

        let v = lerp2(self.v[idx], self.v[idx + 1], self.v[idx + w], self.v[idx + w + 1]);
        let gx = lerp2(
            self.grad[idx].x,
            self.grad[idx + 1].x,
            self.grad[idx + w].x,
            self.grad[idx + w + 1].x,
        );
        let gy = lerp2(
            self.grad[idx].y,
            self.grad[idx + 1].y,
            self.grad[idx + w].y,
            self.grad[idx + w + 1].y,
        );
        let grad = Vec2::new(gx, gy);
        let flat = grad.norm() < FLAT_GRAD_EPS && v > 0.0 && v < 1.0;
        FieldSample { v, grad, clamped, flat }
    }
}
