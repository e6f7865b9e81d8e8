//! Compile formulas into per-epoch Dirichlet boundary conditions, solve the
//! discrete Laplace problem by iterative relaxation, and sample the resulting
//! potential and its gradient at continuous world coordinates.

mod grid;
mod potential;
mod schedule;
mod solver;

pub use grid::{CellState, GridDims, GridTransform, OccupancyGrid, WorldError, WorldSpec};
pub use potential::{FieldSample, PotentialField, FLAT_GRAD_EPS};
pub use schedule::{compile_schedule, ConstraintSchedule, Epoch, RegionSource, ScheduleError};
pub use solver::{
    solve, solve_schedule, EpochField, EpochSolveError, Method, SolveError, SolveStats,
    SolverParams, SweepOrder,
};
