use super::runner::Trajectory;
use crate::field::{CellState, ConstraintSchedule};

/// Post-hoc safety verdict over a recorded trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyReport {
    pub safe: bool,
    /// Time and cell of the first offending sample.
    pub first_violation: Option<(f64, (usize, usize))>,
}

/// Check that no recorded position, and no point sampled at quarter-segment
/// resolution between consecutive positions, lies in an unsafe cell of its
/// epoch. The per-segment subdivision guards against corner cutting between
/// ticks.
pub fn check_safety(traj: &Trajectory, schedule: &ConstraintSchedule) -> SafetyReport {
    for step in &traj.steps {
        let occ = &schedule.epochs[step.epoch].occupancy;
        for q in 0..4 {
            let s = q as f64 * 0.25;
            let p = step.position + (step.next_position - step.position) * s;
            let (i, j) = occ.transform().nearest_cell(p);
            if occ.get(i, j) == CellState::Unsafe {
                return SafetyReport { safe: false, first_violation: Some((step.t, (i, j))) };
            }
        }
    }
    if let Some(last) = traj.steps.last() {
        let occ = &schedule.epochs[last.epoch].occupancy;
        let (i, j) = occ.transform().nearest_cell(last.next_position);
        if occ.get(i, j) == CellState::Unsafe {
            return SafetyReport {
                safe: false,
                first_violation: Some((last.t + traj.dt, (i, j))),
            };
        }
    }
    SafetyReport { safe: true, first_violation: None }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditViolation {
    pub step_index: usize,
    pub t: f64,
    pub v_prev: f64,
    pub v_next: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Largest `V_{t+1} / max(V_t, 1e-12)` over audited pairs.
    pub max_ratio: f64,
    pub violations: Vec<AuditViolation>,
    /// Pairs excluded because the filter declared a flat-gradient stall
    /// there; those steps hold position by design and are already surfaced
    /// through the decision flags and the `Stopped` outcome.
    pub flat_stalled: usize,
}

/// Default slack absorbing interpolation error across cell boundaries.
pub const TOL_AUDIT: f64 = 1e-3;

/// Audit the exponential decay the barrier certifies: between consecutive
/// ticks within one epoch, `V` must not exceed `(1 - k_alpha dt) V_prev`
/// beyond `tol_audit`. Pairs that straddle an epoch switch are excluded
/// because the field changes discontinuously there, and flat-gradient
/// stalls are counted separately rather than reported as silent breaches.
pub fn barrier_decrease_audit(traj: &Trajectory, k_alpha: f64, tol_audit: f64) -> AuditReport {
    let mut max_ratio = 0.0f64;
    let mut violations = Vec::new();
    let mut flat_stalled = 0;
    for (k, pair) in traj.steps.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        if a.epoch != b.epoch {
            continue;
        }
        if a.decision.flags.flat_stop {
            flat_stalled += 1;
            continue;
        }
        let (v_prev, v_next) = (a.decision.v, b.decision.v);
        max_ratio = max_ratio.max(v_next / v_prev.max(1e-12));
        if v_next > (1.0 - k_alpha * traj.dt) * v_prev + tol_audit {
            violations.push(AuditViolation { step_index: k, t: b.t, v_prev, v_next });
        }
    }
    AuditReport { max_ratio, violations, flat_stalled }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{compile_schedule, GridDims, WorldSpec};
    use crate::filter::{DecisionFlags, FilterDecision};
    use crate::geom::{Rect, Vec2};
    use crate::sim::runner::{Outcome, Step};
    use crate::stl::parse;

    fn test_schedule() -> ConstraintSchedule {
        let world = WorldSpec {
            bounds: Rect::new(-1.0, 1.0, -1.0, 1.0),
            grid: GridDims { width: 21, height: 21 },
            obstacles: vec![Rect::new(-0.1, 0.1, -0.1, 0.1)],
            goal: Some(Rect::new(0.55, 0.65, 0.55, 0.65)),
        };
        let f = parse("G[0,10](x>-2)").unwrap();
        compile_schedule(&f, &world, 10.0).unwrap()
    }

    fn step_at(t: f64, from: Vec2, to: Vec2, v: f64) -> Step {
        Step {
            t,
            position: from,
            nominal_force: Vec2::ZERO,
            nominal_u: Vec2::ZERO,
            decision: FilterDecision {
                nominal_u: Vec2::ZERO,
                v,
                grad: Vec2::ZERO,
                lhs: 0.0,
                rhs: 0.0,
                violated: false,
                output_u: (to - from) * 10.0,
                flags: DecisionFlags::default(),
            },
            next_position: to,
            epoch: 0,
        }
    }

    fn traj_of(steps: Vec<Step>) -> Trajectory {
        Trajectory { steps, outcome: Outcome::HorizonExpired, dt: 0.1, horizon: 10.0 }
    }

    #[test]
    fn free_path_is_safe() {
        let schedule = test_schedule();
        let traj = traj_of(vec![
            step_at(0.0, Vec2::new(-0.5, -0.5), Vec2::new(-0.5, -0.4), 0.8),
            step_at(0.1, Vec2::new(-0.5, -0.4), Vec2::new(-0.5, -0.3), 0.7),
        ]);
        assert!(check_safety(&traj, &schedule).safe);
    }

    #[test]
    fn stepping_into_the_obstacle_is_caught() {
        let schedule = test_schedule();
        let traj = traj_of(vec![step_at(0.0, Vec2::new(-0.3, 0.0), Vec2::new(0.0, 0.0), 0.8)]);
        let report = check_safety(&traj, &schedule);
        assert!(!report.safe);
        assert!(report.first_violation.is_some());
    }

    #[test]
    fn corner_cutting_between_ticks_is_caught() {
        // Both endpoints are free but the segment crosses the obstacle.
        let schedule = test_schedule();
        let traj = traj_of(vec![step_at(0.0, Vec2::new(-0.3, 0.0), Vec2::new(0.3, 0.0), 0.8)]);
        assert!(!check_safety(&traj, &schedule).safe);
    }

    #[test]
    fn final_position_is_checked() {
        let schedule = test_schedule();
        // Segment samples at s in {0, .25, .5, .75} all stay left of the
        // obstacle; only the endpoint lands inside it.
        let traj = traj_of(vec![step_at(0.0, Vec2::new(-0.9, 0.0), Vec2::new(0.0, 0.0), 0.8)]);
        assert!(!check_safety(&traj, &schedule).safe);
    }

    #[test]
    fn audit_flags_up_gradient_motion() {
        let up = traj_of(vec![
            step_at(0.0, Vec2::new(-0.5, 0.0), Vec2::new(-0.4, 0.0), 0.5),
            step_at(0.1, Vec2::new(-0.4, 0.0), Vec2::new(-0.3, 0.0), 0.7),
        ]);
        let report = barrier_decrease_audit(&up, 1.0, TOL_AUDIT);
        assert_eq!(report.violations.len(), 1);
        assert!(report.max_ratio > 1.0);

        let down = traj_of(vec![
            step_at(0.0, Vec2::new(-0.5, 0.0), Vec2::new(-0.4, 0.0), 0.7),
            step_at(0.1, Vec2::new(-0.4, 0.0), Vec2::new(-0.3, 0.0), 0.5),
        ]);
        assert!(barrier_decrease_audit(&down, 1.0, TOL_AUDIT).violations.is_empty());
    }

    #[test]
    fn audit_skips_epoch_switches() {
        let mut steps = vec![
            step_at(0.0, Vec2::new(-0.5, 0.0), Vec2::new(-0.4, 0.0), 0.2),
            step_at(0.1, Vec2::new(-0.4, 0.0), Vec2::new(-0.3, 0.0), 0.9),
        ];
        steps[1].epoch = 1;
        let traj = traj_of(steps);
        assert!(barrier_decrease_audit(&traj, 1.0, TOL_AUDIT).violations.is_empty());
    }
}
