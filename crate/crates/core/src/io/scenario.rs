use super::{load_qtable, read_forces_csv, IoError};
use crate::field::{compile_schedule, SolverParams, WorldSpec};
use crate::filter::FilterParams;
use crate::geom::Vec2;
use crate::policy::{NominalPolicy, ReplayPolicy};
use crate::sim::Scenario;
use crate::stl::parse;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

/// Nominal-policy section of a scenario file. File paths resolve relative to
/// the scenario file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PolicyConfig {
    GoalSeek {
        /// Defaults to the center of the static goal rectangle.
        #[serde(default)]
        goal: Option<Vec2>,
        #[serde(default = "default_gain")]
        gain: f64,
        #[serde(default)]
        noise_eps: f64,
    },
    Adversarial,
    QTable { path: String },
    Replay { path: String },
}

fn default_gain() -> f64 {
    1.0
}

/// Timing and run-control section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSection {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub start: Vec2,
    #[serde(default = "default_flat_stop_ticks")]
    pub flat_stop_ticks: usize,
    #[serde(default = "default_true")]
    pub filter_enabled: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_horizon() -> f64 {
    Scenario::DEFAULT_HORIZON
}

fn default_dt() -> f64 {
    Scenario::DEFAULT_DT
}

fn default_flat_stop_ticks() -> usize {
    Scenario::DEFAULT_FLAT_STOP_TICKS
}

fn default_true() -> bool {
    true
}

/// On-disk scenario schema: the world (`bounds`, `grid`, `obstacles`,
/// `goal`), the formula text, and the solver/filter/sim/policy sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(flatten)]
    pub world: WorldSpec,
    pub formula: String,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub filter: FilterParams,
    pub sim: SimSection,
    pub policy: PolicyConfig,
}

impl ScenarioFile {
    /// Resolve file references and parse the formula. `base_dir` anchors
    /// relative policy paths.
    pub fn into_scenario(self, base_dir: &Path) -> Result<Scenario, IoError> {
        let formula = parse(&self.formula)?;
        let policy = match self.policy {
            PolicyConfig::GoalSeek { goal, gain, noise_eps } => {
                let goal = goal
                    .or_else(|| self.world.goal.as_ref().map(|r| r.center()))
                    .ok_or_else(|| {
                        IoError::Scenario(
                            "goal-seek policy needs an explicit goal or a world goal rectangle"
                                .into(),
                        )
                    })?;
                NominalPolicy::GoalSeek { goal, gain, noise_eps }
            }
            PolicyConfig::Adversarial => {
                // The target set is the epoch-0 unsafe set.
                let schedule = compile_schedule(&formula, &self.world, self.sim.horizon)?;
                NominalPolicy::Adversarial {
                    unsafe_centers: schedule.epochs[0].occupancy.unsafe_cell_centers(),
                }
            }
            PolicyConfig::QTable { path } => {
                let table = load_qtable(&base_dir.join(path))?;
                NominalPolicy::Q { table }
            }
            PolicyConfig::Replay { path } => {
                let forces = read_forces_csv(&base_dir.join(path))?;
                NominalPolicy::Replay(ReplayPolicy::new(forces))
            }
        };
        Ok(Scenario {
            world: self.world,
            formula,
            horizon: self.sim.horizon,
            dt: self.sim.dt,
            start: self.sim.start,
            policy,
            filter: self.filter,
            solver: self.solver,
            seed: self.sim.seed,
            flat_stop_ticks: self.sim.flat_stop_ticks,
            filter_enabled: self.sim.filter_enabled,
        })
    }
}

/// Load and resolve a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| IoError::Json { path: path.display().to_string(), source: e })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    file.into_scenario(base_dir)
}
