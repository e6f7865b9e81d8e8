use super::audit::check_safety;
use super::scenario::Scenario;
use crate::field::{
    compile_schedule, solve_schedule, CellState, ConstraintSchedule, EpochField, EpochSolveError,
    ScheduleError,
};
use crate::filter::{admittance, check_barrier, project, DecisionFlags, FilterDecision, FilterError};
use crate::geom::Vec2;
use crate::policy::PolicyState;
use crate::stl::{Signal, SignalError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// One control tick as recorded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub t: f64,
    pub position: Vec2,
    pub nominal_force: Vec2,
    pub nominal_u: Vec2,
    pub decision: FilterDecision,
    pub next_position: Vec2,
    pub epoch: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    ReachedGoal,
    HorizonExpired,
    /// The flat-gradient stop persisted for the configured number of ticks.
    Stopped,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::ReachedGoal => write!(f, "reached-goal"),
            Outcome::HorizonExpired => write!(f, "horizon-expired"),
            Outcome::Stopped => write!(f, "stopped"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    pub outcome: Outcome,
    pub dt: f64,
    pub horizon: f64,
}

impl Trajectory {
    /// The recorded position signal: step positions plus the final
    /// post-integration position, sampled every `dt`.
    pub fn signal(&self) -> Result<Signal, SignalError> {
        let mut points: Vec<Vec2> = self.steps.iter().map(|s| s.position).collect();
        if let Some(last) = self.steps.last() {
            points.push(last.next_position);
        }
        Signal::uniform(0.0, self.dt, points)
    }

    pub fn projected_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.decision.flags.projected).count()
    }
}

/// A run plus the compiled schedule and solved fields it executed against.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub trajectory: Trajectory,
    pub schedule: ConstraintSchedule,
    pub fields: Vec<EpochField>,
}

#[derive(Debug, Clone, Error)]
pub enum SimError {
    #[error("horizon {horizon} is not an integer number of dt={dt} ticks")]
    BadTiming { horizon: f64, dt: f64 },
    #[error("start position {0:?} lies in an unsafe cell; in-collision starts are rejected")]
    StartInCollision(Vec2),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Solve(#[from] EpochSolveError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// Execute the five-step control loop:
/// query policy, admittance-map, sample field, filter, integrate.
///
/// Epochs switch at tick boundaries. The run ends early when the position
/// enters a goal cell of the then-active epoch, or when the flat-gradient
/// stop persists for `flat_stop_ticks` consecutive ticks.
pub fn run(sc: &Scenario) -> Result<RunResult, SimError> {
    let ticks = sc
        .tick_count()
        .ok_or(SimError::BadTiming { horizon: sc.horizon, dt: sc.dt })?;
    let schedule = compile_schedule(&sc.formula, &sc.world, sc.horizon)?;
    let fields = solve_schedule(&schedule, &sc.solver)?;

    let epoch0 = &schedule.epochs[0].occupancy;
    if epoch0.state_at_world(sc.start) == CellState::Unsafe {
        return Err(SimError::StartInCollision(sc.start));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let mut position = sc.start;
    let mut velocity = Vec2::ZERO;
    let mut steps: Vec<Step> = Vec::with_capacity(ticks);
    let mut outcome = Outcome::HorizonExpired;
    let mut flat_streak = 0usize;

    if epoch0.state_at_world(sc.start) == CellState::Goal {
        return Ok(RunResult {
            trajectory: Trajectory {
                steps,
                outcome: Outcome::ReachedGoal,
                dt: sc.dt,
                horizon: sc.horizon,
            },
            schedule,
            fields,
        });
    }

    for k in 0..ticks {
        let t = k as f64 * sc.dt;
        let epoch = schedule.epoch_index_at(t);
        let field = &fields[epoch].field;
        let state = PolicyState { position, velocity };

        let force = sc.policy.force(&state, k, &mut rng);
        let u_nom = admittance(force, sc.filter.alpha_adm);
        let sample = field.sample(position);

        let decision = if sc.filter_enabled {
            project(u_nom, sample.v, sample.grad, &sc.filter)?
        } else {
            let check = check_barrier(u_nom, sample.v, sample.grad, sc.filter.k_alpha);
            FilterDecision {
                nominal_u: u_nom,
                v: sample.v,
                grad: sample.grad,
                lhs: check.lhs,
                rhs: check.rhs,
                violated: !check.satisfied,
                output_u: u_nom,
                flags: DecisionFlags::default(),
            }
        };

        let next_position = position + decision.output_u * sc.dt;
        steps.push(Step {
            t,
            position,
            nominal_force: force,
            nominal_u: u_nom,
            decision,
            next_position,
            epoch,
        });

        if decision.flags.flat_stop {
            flat_streak += 1;
            if flat_streak >= sc.flat_stop_ticks {
                outcome = Outcome::Stopped;
                break;
            }
        } else {
            flat_streak = 0;
        }

        let t_next = (k + 1) as f64 * sc.dt;
        let next_epoch = schedule.epoch_index_at(t_next);
        if schedule.epochs[next_epoch].occupancy.state_at_world(next_position) == CellState::Goal {
            outcome = Outcome::ReachedGoal;
            break;
        }

        position = next_position;
        velocity = decision.output_u;
    }

    Ok(RunResult {
        trajectory: Trajectory { steps, outcome, dt: sc.dt, horizon: sc.horizon },
        schedule,
        fields,
    })
}

/// Aggregate results over independent scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct BatchSummary {
    pub n: usize,
    pub safe_count: usize,
    pub reach_count: usize,
    pub mean_steps: f64,
    pub mean_projections: f64,
}

/// Run scenarios in parallel (each is internally sequential and seeded, so
/// the aggregate is deterministic) and summarize safety and task outcomes.
pub fn batch(scenarios: &[Scenario]) -> Result<BatchSummary, SimError> {
    if scenarios.is_empty() {
        return Ok(BatchSummary::default());
    }
    let results: Result<Vec<RunResult>, SimError> =
        scenarios.par_iter().map(run).collect();
    let results = results?;

    let n = results.len();
    let mut safe_count = 0;
    let mut reach_count = 0;
    let mut total_steps = 0usize;
    let mut total_projections = 0usize;
    for r in &results {
        if check_safety(&r.trajectory, &r.schedule).safe {
            safe_count += 1;
        }
        if r.trajectory.outcome == Outcome::ReachedGoal {
            reach_count += 1;
        }
        total_steps += r.trajectory.steps.len();
        total_projections += r.trajectory.projected_steps();
    }
    Ok(BatchSummary {
        n,
        safe_count,
        reach_count,
        mean_steps: total_steps as f64 / n as f64,
        mean_projections: total_projections as f64 / n as f64,
    })
}
