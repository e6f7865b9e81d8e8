use super::scenario::Scenario;
use crate::field::{CellState, GridDims, Method, OccupancyGrid, SolverParams, SweepOrder, WorldSpec};
use crate::filter::FilterParams;
use crate::geom::Rect;
use crate::policy::NominalPolicy;
use crate::stl::{parse, StlFormula, TemporalOp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which nominal policy a generated scenario gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyMix {
    /// Even seeds adversarial, odd seeds noisy goal-seek.
    Alternating,
    AdversarialOnly,
    NoisyGoalSeekOnly,
}

/// Parameters of the randomized scenario distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub grid: usize,
    /// Fraction of interior cells covered by obstacle rectangles.
    pub coverage_range: (f64, f64),
    pub horizon: f64,
    pub dt: f64,
    pub policy_mix: PolicyMix,
    pub filter_enabled: bool,
    pub filter: FilterParams,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            grid: 50,
            coverage_range: (0.05, 0.25),
            horizon: 20.0,
            dt: 0.01,
            policy_mix: PolicyMix::Alternating,
            filter_enabled: true,
            // Gains sized so the worst-case projected speed
            // k_alpha / grad_epsilon keeps one Euler step under a cell:
            // healthy field gradients stay well above grad_epsilon while
            // near-flat pockets trigger the stop instead of a huge command.
            filter: FilterParams {
                k_alpha: 0.15,
                alpha_adm: 0.1,
                grad_epsilon: 0.04,
                speed_limit: None,
            },
        }
    }
}

/// A drawn scenario plus the uninflated constraints it is audited against.
///
/// The run enforces obstacles grown by one cell and a stay-box shrunk by one
/// cell; a trajectory that respects those with sub-cell slack still clears
/// the true constraints. Interpolated fields only pin `V = 1` at unsafe cell
/// centers, so a wall-hugging command can intrude fractions of a cell into a
/// territory; the inflation margin absorbs that.
#[derive(Debug, Clone)]
pub struct GeneratedScenario {
    pub scenario: Scenario,
    /// The true obstacle rectangles and goal, before inflation.
    pub audit_world: WorldSpec,
    /// The true stay-box formula, one cell wider than the enforced one.
    pub audit_formula: StlFormula,
}

/// Draw one scenario: random rectangular obstacles at the target coverage, a
/// random feasible start and goal, a stay-in-box `G` formula around them, and
/// the seed-selected nominal policy. Deterministic in `seed`.
pub fn random_scenario(seed: u64, cfg: &GeneratorConfig) -> GeneratedScenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = Rect::new(-1.0, 1.0, -1.0, 1.0);
    let n = cfg.grid;
    let mut true_world = WorldSpec {
        bounds,
        grid: GridDims { width: n, height: n },
        obstacles: vec![],
        goal: None,
    };
    let transform = true_world.transform();
    let (dx, dy) = transform.cell_size();

    // Obstacles: accumulate random rectangles until the rasterized interior
    // coverage reaches a target drawn from the configured range.
    let target = rng.gen_range(cfg.coverage_range.0..cfg.coverage_range.1);
    let interior_cells = ((n - 2) * (n - 2)) as f64;
    for _ in 0..200 {
        if obstacle_cells(&true_world) / interior_cells >= target {
            break;
        }
        let hw = rng.gen_range(0.05..0.25);
        let hh = rng.gen_range(0.05..0.25);
        let cx = rng.gen_range(bounds.x_min + hw..bounds.x_max - hw);
        let cy = rng.gen_range(bounds.y_min + hh..bounds.y_max - hh);
        true_world.obstacles.push(Rect::new(cx - hw, cx + hw, cy - hh, cy + hh));
        if obstacle_cells(&true_world) / interior_cells > cfg.coverage_range.1 {
            true_world.obstacles.pop();
        }
    }

    let mut run_world = true_world.clone();
    run_world.obstacles = true_world
        .obstacles
        .iter()
        .map(|r| {
            Rect::new(
                (r.x_min - dx).max(bounds.x_min),
                (r.x_max + dx).min(bounds.x_max),
                (r.y_min - dy).max(bounds.y_min),
                (r.y_max + dy).min(bounds.y_max),
            )
        })
        .collect();

    // Goal: a random cell free in the inflated world, with margin from the
    // border; a rectangle over its 3x3 neighborhood keeps the near-goal
    // gradient healthy.
    let occ = run_world.static_occupancy();
    let margin = 4usize;
    let free: Vec<(usize, usize)> = (margin..n - margin)
        .flat_map(|j| (margin..n - margin).map(move |i| (i, j)))
        .filter(|&(i, j)| occ.get(i, j) == CellState::Free)
        .collect();
    assert!(!free.is_empty(), "coverage cap leaves free cells");
    let (gi, gj) = free[rng.gen_range(0..free.len())];
    let gc = transform.cell_center(gi, gj);
    let goal = Rect::new(gc.x - 1.2 * dx, gc.x + 1.2 * dx, gc.y - 1.2 * dy, gc.y + 1.2 * dy);
    run_world.goal = Some(goal);
    true_world.goal = Some(goal);

    // Start: a different free cell, not inside the goal rectangle.
    let start_cells: Vec<&(usize, usize)> = free
        .iter()
        .filter(|&&(i, j)| !goal.contains(transform.cell_center(i, j)))
        .collect();
    let &(si, sj) = start_cells[rng.gen_range(0..start_cells.len())];
    let start = transform.cell_center(si, sj);

    // Stay-in-box formula around start and goal. Thresholds snap to
    // cell-territory boundaries (center +- half cell) so that staying out of
    // violating cells implies satisfying the atoms on the continuous
    // trajectory; upper bounds are negated strict atoms, x <= c == !(x > c).
    // The enforced box is one cell tighter than the audited one.
    let mcells = rng.gen_range(4..12);
    let ix0 = si.min(gi).saturating_sub(mcells).max(1);
    let ix1 = (si.max(gi) + mcells).min(n - 2);
    let iy0 = sj.min(gj).saturating_sub(mcells).max(1);
    let iy1 = (sj.max(gj) + mcells).min(n - 2);
    let box_formula = |x0: usize, x1: usize, y0: usize, y1: usize| {
        let text = format!(
            "G[0,{h}](x >= {bx0} & !(x > {bx1}) & y >= {by0} & !(y > {by1}))",
            h = cfg.horizon,
            bx0 = bounds.x_min + (x0 as f64 - 0.5) * dx,
            bx1 = bounds.x_min + (x1 as f64 + 0.5) * dx,
            by0 = bounds.y_min + (y0 as f64 - 0.5) * dy,
            by1 = bounds.y_min + (y1 as f64 + 0.5) * dy,
        );
        parse(&text).expect("generated formula is in the fragment")
    };
    let formula = box_formula(ix0 + 1, ix1 - 1, iy0 + 1, iy1 - 1);
    let audit_formula = box_formula(ix0, ix1, iy0, iy1);

    // The adversary aims at the true unsafe set, not the inflated one, so
    // an unfiltered run actually reaches forbidden cells.
    let policy = match (cfg.policy_mix, seed % 2 == 0) {
        (PolicyMix::AdversarialOnly, _) | (PolicyMix::Alternating, true) => {
            let mut epoch0 = true_world.static_occupancy();
            mark_formula_unsafe(&mut epoch0, &audit_formula);
            NominalPolicy::Adversarial { unsafe_centers: epoch0.unsafe_cell_centers() }
        }
        (PolicyMix::NoisyGoalSeekOnly, _) | (PolicyMix::Alternating, false) => {
            NominalPolicy::GoalSeek { goal: gc, gain: 1.0, noise_eps: 0.3 }
        }
    };

    GeneratedScenario {
        scenario: Scenario {
            world: run_world,
            formula,
            horizon: cfg.horizon,
            dt: cfg.dt,
            start,
            policy,
            filter: cfg.filter,
            solver: SolverParams {
                method: Method::Sor,
                omega: 1.8,
                tol: 1e-6,
                max_iters: 50_000,
                sweep: SweepOrder::Forward,
            },
            seed,
            flat_stop_ticks: Scenario::DEFAULT_FLAT_STOP_TICKS,
            filter_enabled: cfg.filter_enabled,
        },
        audit_world: true_world,
        audit_formula,
    }
}

/// Interior cells covered by obstacle rectangles (cell-center rasterization).
fn obstacle_cells(world: &WorldSpec) -> f64 {
    let transform = world.transform();
    let (w, h) = (world.grid.width, world.grid.height);
    let mut count = 0usize;
    for j in 1..h - 1 {
        for i in 1..w - 1 {
            let p = transform.cell_center(i, j);
            if world.obstacles.iter().any(|r| r.contains(p)) {
                count += 1;
            }
        }
    }
    count as f64
}

fn mark_formula_unsafe(occ: &mut OccupancyGrid, formula: &StlFormula) {
    let transform = *occ.transform();
    for j in 0..occ.height() {
        for i in 0..occ.width() {
            let p = transform.cell_center(i, j);
            for c in &formula.conjuncts {
                if c.op == TemporalOp::Always && !c.body_holds(p.x, p.y) {
                    occ.set(i, j, CellState::Unsafe);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::compile_schedule;

    #[test]
    fn generation_is_deterministic() {
        let cfg = GeneratorConfig::default();
        let a = random_scenario(9, &cfg);
        let b = random_scenario(9, &cfg);
        assert_eq!(a.scenario.world, b.scenario.world);
        assert_eq!(a.scenario.formula, b.scenario.formula);
        assert_eq!(a.scenario.start, b.scenario.start);
        assert_eq!(a.audit_formula, b.audit_formula);
    }

    #[test]
    fn coverage_lands_in_range() {
        let cfg = GeneratorConfig::default();
        for seed in 0..20 {
            let g = random_scenario(seed, &cfg);
            let interior = ((cfg.grid - 2) * (cfg.grid - 2)) as f64;
            let covered = obstacle_cells(&g.audit_world) / interior;
            assert!(covered <= cfg.coverage_range.1 + 1e-9, "seed {seed}: {covered}");
        }
    }

    #[test]
    fn generated_scenarios_compile_and_start_free() {
        let cfg = GeneratorConfig::default();
        for seed in 0..20 {
            let g = random_scenario(seed, &cfg);
            let sc = &g.scenario;
            let schedule = compile_schedule(&sc.formula, &sc.world, sc.horizon)
                .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            let occ = &schedule.epochs[0].occupancy;
            assert_eq!(occ.state_at_world(sc.start), CellState::Free, "seed {seed}");
            assert!(occ.count(CellState::Goal) > 0);
            // the audited constraints compile too, and the enforced unsafe
            // set contains the audited one
            let audit = compile_schedule(&g.audit_formula, &g.audit_world, sc.horizon)
                .unwrap_or_else(|e| panic!("seed {seed} audit: {e}"));
            let audit_occ = &audit.epochs[0].occupancy;
            for j in 0..occ.height() {
                for i in 0..occ.width() {
                    if audit_occ.get(i, j) == CellState::Unsafe {
                        assert_eq!(
                            occ.get(i, j),
                            CellState::Unsafe,
                            "seed {seed}: audited unsafe cell ({i},{j}) not enforced"
                        );
                    }
                }
            }
        }
    }
}
