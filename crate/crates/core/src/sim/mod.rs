//! The filtered control loop on a planar point mass: query the policy, map
//! force to velocity, sample the active epoch's field, filter, integrate.
//! Plus post-hoc auditors, batch evaluation, and a seeded scenario
//! distribution for randomized testing.

mod audit;
mod generator;
mod runner;
mod scenario;

pub use audit::{
    barrier_decrease_audit, check_safety, AuditReport, AuditViolation, SafetyReport, TOL_AUDIT,
};
pub use generator::{random_scenario, GeneratedScenario, GeneratorConfig, PolicyMix};
pub use runner::{batch, run, BatchSummary, Outcome, RunResult, SimError, Step, Trajectory};
pub use scenario::Scenario;
