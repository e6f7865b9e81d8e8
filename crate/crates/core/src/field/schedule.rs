use super::grid::{CellState, OccupancyGrid, WorldError, WorldSpec};
use crate::stl::{StlFormula, TemporalOp};
use thiserror::Error;

/// Where a marked region came from, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSource {
    /// Index into the formula's conjunct list.
    Conjunct(usize),
    /// Index into the world's obstacle list.
    StaticObstacle(usize),
    StaticGoal,
    Border,
}

/// A maximal time interval over which the compiled occupancy is constant.
///
/// Epochs are half-open `[t_start, t_end)` except the last, which is closed,
/// so every `t` in `[0, horizon]` belongs to exactly one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub occupancy: OccupancyGrid,
    /// Which sources contributed which cell state in this epoch.
    pub sources: Vec<(RegionSource, CellState)>,
}

impl Epoch {
    pub fn contains(&self, t: f64, is_last: bool) -> bool {
        if is_last {
            t >= self.t_start && t <= self.t_end
        } else {
            t >= self.t_start && t < self.t_end
        }
    }
}

/// Piecewise-constant timeline of goal/unsafe occupancy over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSchedule {
    pub horizon: f64,
    pub epochs: Vec<Epoch>,
}

impl ConstraintSchedule {
    /// Index of the epoch containing `t` (clamped to `[0, horizon]`).
    pub fn epoch_index_at(&self, t: f64) -> usize {
        let last = self.epochs.len() - 1;
        for (k, e) in self.epochs.iter().enumerate() {
            if e.contains(t, k == last) {
                return k;
            }
        }
        if t < 0.0 {
            0
        } else {
            last
        }
    }

    pub fn epoch_at(&self, t: f64) -> &Epoch {
        &self.epochs[self.epoch_index_at(t)]
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScheduleError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("horizon {horizon} is shorter than the latest window end {needed}")]
    HorizonTooShort { horizon: f64, needed: f64 },
    #[error("epoch {epoch} [{t_start},{t_end}] has no goal cell; at least one goal cell is required")]
    NoGoalCell { epoch: usize, t_start: f64, t_end: f64 },
    #[error("epoch {epoch}: overlapping 'F' windows have disjoint satisfying regions")]
    EmptyGoalIntersection { epoch: usize },
}

/// Compile a formula and world into per-epoch Dirichlet boundary conditions.
///
/// Epoch boundaries are the sorted distinct window endpoints plus `0` and
/// `horizon`. Within each overlapped epoch, an `Always` conjunct marks every
/// cell whose center violates its body as unsafe, and an `Eventually`
/// conjunct marks every cell whose center satisfies its body as a goal
/// (several overlapping `F` windows intersect their regions). Static
/// obstacles, the static goal, and the grid border apply in all epochs, and
/// unsafe wins whenever a cell is claimed both ways.
pub fn compile_schedule(
    formula: &StlFormula,
    world: &WorldSpec,
    horizon: f64,
) -> Result<ConstraintSchedule, ScheduleError> {
    world.validate()?;
    let needed = formula.horizon();
    if horizon < needed {
        return Err(ScheduleError::HorizonTooShort { horizon, needed });
    }

    let mut boundaries = vec![0.0, horizon];
    for c in &formula.conjuncts {
        boundaries.push(c.window.0);
        boundaries.push(c.window.1);
    }
    boundaries.retain(|t| *t >= 0.0 && *t <= horizon);
    boundaries.sort_by(|a, b| a.partial_cmp(b).expect("finite window endpoints"));
    boundaries.dedup();

    let transform = world.transform();
    let (w, h) = (transform.dims.width, transform.dims.height);
    let n = w * h;

    let mut epochs = Vec::with_capacity(boundaries.len() - 1);
    for (index, pair) in boundaries.windows(2).enumerate() {
        let (t_start, t_end) = (pair[0], pair[1]);
        let mut sources = Vec::new();

        // Goal mask: intersection of active F regions, then union with the
        // static goal.
        let mut goal = vec![false; n];
        let mut have_active_f = false;
        let mut active_f = 0usize;
        for (ci, c) in formula.conjuncts.iter().enumerate() {
            if c.op != TemporalOp::Eventually {
                continue;
            }
            if !(t_start < c.window.1 && t_end > c.window.0) {
                continue;
            }
            active_f += 1;
            let mut mask = vec![false; n];
            for j in 0..h {
                for i in 0..w {
                    let p = transform.cell_center(i, j);
                    mask[j * w + i] = c.body_holds(p.x, p.y);
                }
            }
            if have_active_f {
                for (g, m) in goal.iter_mut().zip(&mask) {
                    *g &= m;
                }
            } else {
                goal = mask;
                have_active_f = true;
            }
            sources.push((RegionSource::Conjunct(ci), CellState::Goal));
        }
        if active_f >= 2 && !goal.iter().any(|g| *g) {
            return Err(ScheduleError::EmptyGoalIntersection { epoch: index });
        }

        // Unsafe mask: cells violating the body of any active G conjunct.
        let mut unsafe_mask = vec![false; n];
        for (ci, c) in formula.conjuncts.iter().enumerate() {
            if c.op != TemporalOp::Always {
                continue;
            }
            if !(t_start < c.window.1 && t_end > c.window.0) {
                continue;
            }
            for j in 0..h {
                for i in 0..w {
                    let p = transform.cell_center(i, j);
                    if !c.body_holds(p.x, p.y) {
                        unsafe_mask[j * w + i] = true;
                    }
                }
            }
            sources.push((RegionSource::Conjunct(ci), CellState::Unsafe));
        }

        let mut occ = OccupancyGrid::free(transform);
        for j in 0..h {
            for i in 0..w {
                if goal[j * w + i] {
                    occ.set(i, j, CellState::Goal);
                }
            }
        }
        if let Some(g) = &world.goal {
            occ.mark_rect(g, CellState::Goal);
            sources.push((RegionSource::StaticGoal, CellState::Goal));
        }
        for j in 0..h {
            for i in 0..w {
                if unsafe_mask[j * w + i] {
                    occ.set(i, j, CellState::Unsafe);
                }
            }
        }
        for (oi, r) in world.obstacles.iter().enumerate() {
            occ.mark_rect(r, CellState::Unsafe);
            sources.push((RegionSource::StaticObstacle(oi), CellState::Unsafe));
        }
        occ.close_border();
        sources.push((RegionSource::Border, CellState::Unsafe));

        if occ.count(CellState::Goal) == 0 {
            return Err(ScheduleError::NoGoalCell { epoch: index, t_start, t_end });
        }
        epochs.push(Epoch { index, t_start, t_end, occupancy: occ, sources });
    }

    Ok(ConstraintSchedule { horizon, epochs })
}
