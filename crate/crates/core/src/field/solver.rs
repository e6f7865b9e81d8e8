use super::grid::{CellState, OccupancyGrid};
use super::potential::PotentialField;
use super::schedule::ConstraintSchedule;
use crate::geom::Vec2;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;
use thiserror::Error;

/// Relaxation method. SOR with `omega = 1` is Gauss-Seidel; Jacobi updates
/// from the previous sweep only. Jacobi and Gauss-Seidel exist for oracle
/// and benchmark comparisons; SOR is the working default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Jacobi,
    GaussSeidel,
    Sor,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Jacobi => write!(f, "jacobi"),
            Method::GaussSeidel => write!(f, "gauss-seidel"),
            Method::Sor => write!(f, "sor"),
        }
    }
}

/// Traversal order of the in-place sweeps (Gauss-Seidel / SOR).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepOrder {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub method: Method,
    /// Relaxation factor, `1 <= omega < 2`. Ignored by Jacobi and
    /// Gauss-Seidel.
    pub omega: f64,
    /// Sweep stops when the largest absolute cell update falls below this.
    pub tol: f64,
    pub max_iters: usize,
    pub sweep: SweepOrder,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            method: Method::Sor,
            omega: 1.8,
            tol: 1e-6,
            max_iters: 50_000,
            sweep: SweepOrder::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub final_residual: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("relaxation did not converge: residual {0} >= tol after {1} sweeps", .stats.final_residual, .stats.iterations)]
    NonConverged { stats: SolveStats },
    #[error("occupancy has no goal cell; the potential would degenerate")]
    NoGoalCell,
    #[error("border cell ({i},{j}) is not unsafe; the grid border is the domain boundary")]
    OpenBorder { i: usize, j: usize },
    #[error("omega must lie in [1,2), got {0}")]
    BadOmega(f64),
    #[error("tolerance must be positive, got {0}")]
    BadTol(f64),
}

/// Solve the Dirichlet problem on one occupancy grid.
///
/// Goal cells are pinned at `V = 0`, unsafe cells at `V = 1`, and free cells
/// relax toward the mean of their four neighbors until the largest update in
/// a sweep drops below `tol`. Iterates stay projected into `[0, 1]`, which
/// over-relaxation can otherwise transiently leave; the fixed point is
/// interior so the projection does not move it. The gradient grid is filled
/// afterward by central differences (one-sided on the border) scaled by the
/// world cell size.
pub fn solve(occupancy: &OccupancyGrid, params: &SolverParams) -> Result<PotentialField, SolveError> {
    if !(params.omega >= 1.0 && params.omega < 2.0) {
        return Err(SolveError::BadOmega(params.omega));
    }
    if !(params.tol > 0.0) {
        return Err(SolveError::BadTol(params.tol));
    }
    let (w, h) = (occupancy.width(), occupancy.height());
    for j in 0..h {
        for i in 0..w {
            if occupancy.is_border(i, j) && occupancy.get(i, j) != CellState::Unsafe {
                return Err(SolveError::OpenBorder { i, j });
            }
        }
    }
    if occupancy.count(CellState::Goal) == 0 {
        return Err(SolveError::NoGoalCell);
    }

    let start = Instant::now();
    let cells = occupancy.cells();
    let mut v: Vec<f64> = cells
        .iter()
        .map(|c| match c {
            CellState::Goal => 0.0,
            CellState::Unsafe => 1.0,
            CellState::Free => 0.5,
        })
        .collect();

    // Free cells are never on the border, so all four neighbors exist.
    let free: Vec<usize> = (0..cells.len())
        .filter(|&idx| cells[idx] == CellState::Free)
        .collect();

    let mut iterations = 0;
    let mut residual = 0.0;
    let mut converged = free.is_empty();
    let omega = match params.method {
        Method::Jacobi | Method::GaussSeidel => 1.0,
        Method::Sor => params.omega,
    };

    let mut scratch = if params.method == Method::Jacobi { v.clone() } else { Vec::new() };
    while !converged && iterations < params.max_iters {
        residual = 0.0;
        match params.method {
            Method::Jacobi => {
                for &idx in &free {
                    let mean = 0.25 * (v[idx - 1] + v[idx + 1] + v[idx - w] + v[idx + w]);
                    let next = mean.clamp(0.0, 1.0);
                    let delta = (next - v[idx]).abs();
                    if delta > residual {
                        residual = delta;
                    }
                    scratch[idx] = next;
                }
                for &idx in &free {
                    v[idx] = scratch[idx];
                }
            }
            Method::GaussSeidel | Method::Sor => {
                let sweep_cell = |idx: usize, v: &mut [f64], residual: &mut f64| {
                    let mean = 0.25 * (v[idx - 1] + v[idx + 1] + v[idx - w] + v[idx + w]);
                    let next = ((1.0 - omega) * v[idx] + omega * mean).clamp(0.0, 1.0);
                    let delta = (next - v[idx]).abs();
                    if delta > *residual {
                        *residual = delta;
                    }
                    v[idx] = next;
                };
                match params.sweep {
                    SweepOrder::Forward => {
                        for &idx in &free {
                            sweep_cell(idx, &mut v, &mut residual);
                        }
                    }
                    SweepOrder::Reverse => {
                        for &idx in free.iter().rev() {
                            sweep_cell(idx, &mut v, &mut residual);
                        }
                    }
                }
            }
        }
        iterations += 1;
        converged = residual < params.tol;
    }

    let stats = SolveStats {
        iterations,
        final_residual: residual,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    if !converged {
        return Err(SolveError::NonConverged { stats });
    }

    let grad = gradient_grid(&v, occupancy);
    Ok(PotentialField::new(occupancy.clone(), v, grad, stats))
}

/// Central differences on interior cells, one-sided next to the border,
/// divided by world cell size.
fn gradient_grid(v: &[f64], occupancy: &OccupancyGrid) -> Vec<Vec2> {
    let (w, h) = (occupancy.width(), occupancy.height());
    let (dx, dy) = occupancy.transform().cell_size();
    let mut grad = vec![Vec2::ZERO; v.len()];
    for j in 0..h {
        for i in 0..w {
            let idx = j * w + i;
            let gx = if i == 0 {
                (v[idx + 1] - v[idx]) / dx
            } else if i == w - 1 {
                (v[idx] - v[idx - 1]) / dx
            } else {
                (v[idx + 1] - v[idx - 1]) / (2.0 * dx)
            };
            let gy = if j == 0 {
                (v[idx + w] - v[idx]) / dy
            } else if j == h - 1 {
                (v[idx] - v[idx - w]) / dy
            } else {
                (v[idx + w] - v[idx - w]) / (2.0 * dy)
            };
            grad[idx] = Vec2::new(gx, gy);
        }
    }
    grad
}

/// One solved field per epoch. Epochs with identical occupancies share a
/// single solve (and therefore identical stats).
#[derive(Debug, Clone)]
pub struct EpochField {
    pub epoch_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub field: Arc<PotentialField>,
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("epoch {epoch}: {source}")]
pub struct EpochSolveError {
    pub epoch: usize,
    #[source]
    pub source: SolveError,
}

pub fn solve_schedule(
    schedule: &ConstraintSchedule,
    params: &SolverParams,
) -> Result<Vec<EpochField>, EpochSolveError> {
    let mut cache: HashMap<Vec<u8>, Arc<PotentialField>> = HashMap::new();
    let mut out = Vec::with_capacity(schedule.epochs.len());
    for epoch in &schedule.epochs {
        let key = epoch.occupancy.structural_key();
        let field = match cache.get(&key) {
            Some(f) => Arc::clone(f),
            None => {
                let f = Arc::new(
                    solve(&epoch.occupancy, params)
                        .map_err(|source| EpochSolveError { epoch: epoch.index, source })?,
                );
                cache.insert(key, Arc::clone(&f));
                f
            }
        };
        out.push(EpochField {
            epoch_index: epoch.index,
            t_start: epoch.t_start,
            t_end: epoch.t_end,
            field,
        });
    }
    Ok(out)
}
