//! The closed-form half-space projection against brute-force search over a
//! discretized feasible set.

mod common;

use common::{polar_projection_oracle, random_violated_instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stlshield::filter::{project, FilterParams};

#[test]
fn closed_form_matches_fine_polar_grid() {
    // 1000 x 1000 polar candidates per instance (radius up to 2|u|). Against
    // a single-stage grid the tight comparison is on the objective: the
    // winner's correction norm must agree with the closed form within 1e-3,
    // and the closed form can never lose to any grid candidate.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..40 {
        let inst = random_violated_instance(&mut rng);
        let params = FilterParams { k_alpha: inst.k_alpha, ..Default::default() };
        let d = project(inst.u, inst.v, inst.grad, &params).unwrap();
        assert!(d.flags.projected, "case {case} should be violated");

        let brute = polar_projection_oracle(&inst, 1000, 1000);
        let d_closed = (d.output_u - inst.u).norm();
        let d_brute = (brute - inst.u).norm();
        assert!(
            (d_closed - d_brute).abs() < 1e-3,
            "case {case}: correction norms {d_closed} vs {d_brute}"
        );
        assert!(d_closed <= d_brute + 1e-9, "closed form must not lose to the grid");
    }
}

#[test]
fn constraint_active_with_equality_when_projected() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..2000 {
        let inst = random_violated_instance(&mut rng);
        let params = FilterParams { k_alpha: inst.k_alpha, ..Default::default() };
        let d = project(inst.u, inst.v, inst.grad, &params).unwrap();
        assert!((d.grad.dot(d.output_u) - d.rhs).abs() < 1e-9);
    }
}

#[test]
fn output_is_always_feasible_or_flat_stopped() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..2000 {
        let inst = random_violated_instance(&mut rng);
        let params = FilterParams { k_alpha: inst.k_alpha, ..Default::default() };
        let d = project(inst.u, inst.v, inst.grad, &params).unwrap();
        assert!(
            d.grad.dot(d.output_u) <= d.rhs + 1e-9 || d.flags.flat_stop,
            "infeasible output without flat stop"
        );
    }
}
