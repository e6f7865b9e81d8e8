use crate::field::{SolverParams, WorldSpec};
use crate::filter::FilterParams;
use crate::geom::Vec2;
use crate::policy::NominalPolicy;
use crate::stl::StlFormula;

/// Everything one simulation run needs, with file references already
/// resolved (see `io::load_scenario` for the on-disk form).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub world: WorldSpec,
    pub formula: StlFormula,
    /// Simulation horizon in seconds; must be an integer number of ticks.
    pub horizon: f64,
    pub dt: f64,
    pub start: Vec2,
    pub policy: NominalPolicy,
    pub filter: FilterParams,
    pub solver: SolverParams,
    pub seed: u64,
    /// Consecutive flat-gradient stops before the run terminates.
    pub flat_stop_ticks: usize,
    /// With the filter disabled the nominal command is applied verbatim;
    /// the barrier is still evaluated for the record.
    pub filter_enabled: bool,
}

impl Scenario {
    pub const DEFAULT_DT: f64 = 0.05;
    pub const DEFAULT_HORIZON: f64 = 20.0;
    pub const DEFAULT_FLAT_STOP_TICKS: usize = 10;

    /// Number of integration ticks, or `None` when `horizon/dt` is not an
    /// integer within 1e-9.
    pub fn tick_count(&self) -> Option<usize> {
        if !(self.dt > 0.0) || !(self.horizon > 0.0) {
            return None;
        }
        let ratio = self.horizon / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() <= 1e-9 * ratio.max(1.0) {
            Some(n as usize)
        } else {
            None
        }
    }
}
