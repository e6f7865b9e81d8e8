//! Shared fixtures for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stlshield::field::{CellState, GridDims, OccupancyGrid, WorldSpec};
use stlshield::geom::Rect;

/// Empty world with a closed border and a single goal cell at the center.
pub fn center_goal_grid(side: usize) -> OccupancyGrid {
    let world = WorldSpec {
        bounds: Rect::new(-1.0, 1.0, -1.0, 1.0),
        grid: GridDims { width: side, height: side },
        obstacles: vec![],
        goal: None,
    };
    let mut occ = OccupancyGrid::free(world.transform());
    occ.close_border();
    occ.set(side / 2, side / 2, CellState::Goal);
    occ
}

/// Like [`center_goal_grid`] but with random obstacle blocks at roughly the
/// given interior coverage.
pub fn cluttered_grid(side: usize, coverage: f64, seed: u64) -> OccupancyGrid {
    let mut occ = center_goal_grid(side);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = ((side - 2) * (side - 2)) as f64 * coverage;
    let mut covered = 0.0;
    while covered < target {
        let bw = rng.gen_range(2..side / 8 + 3);
        let bh = rng.gen_range(2..side / 8 + 3);
        let i0 = rng.gen_range(1..side - 1 - bw);
        let j0 = rng.gen_range(1..side - 1 - bh);
        for j in j0..j0 + bh {
            for i in i0..i0 + bw {
                if occ.get(i, j) == CellState::Free {
                    occ.set(i, j, CellState::Unsafe);
                    covered += 1.0;
                }
            }
        }
    }
    occ
}
