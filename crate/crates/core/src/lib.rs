//! Shield nominal velocity policies with safety certificates compiled from
//! restricted Signal Temporal Logic specifications.
//!
//! The pipeline has four stages:
//!
//! 1. [`stl`] parses a restricted STL fragment (bounded `G`/`F` over
//!    conjunctions of axis-threshold literals) and monitors recorded
//!    trajectories against it.
//! 2. [`field`] compiles a formula plus a world description into
//!    per-epoch Dirichlet boundary conditions, solves the discrete
//!    Laplace problem by successive over-relaxation, and samples the
//!    resulting potential `V` and its gradient at continuous coordinates.
//! 3. [`filter`] tests the barrier inequality `grad(V)ᵀu <= -k_alpha V`
//!    against any nominal velocity command and minimally projects
//!    violating commands onto the safe half-space.
//! 4. [`sim`] runs the filtered control loop on a planar point mass,
//!    records trajectories, and audits them for safety and barrier decay.
//!
//! [`policy`] provides nominal force policies to wrap (scripted baselines,
//! file replay, and a tabular Q-learning trainer), and [`io`] holds the
//! file formats (scenario JSON, field export, trajectory CSV, renders).

pub mod field;
pub mod filter;
pub mod geom;
pub mod io;
pub mod policy;
pub mod sim;
pub mod stl;

pub use geom::{Rect, Vec2};
