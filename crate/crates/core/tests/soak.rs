mod common;
use rayon::prelude::*;
use stlshield::field::compile_schedule;
use stlshield::sim::{check_safety, random_scenario, run, GeneratorConfig};

#[test]
#[ignore = "long soak; run explicitly"]
fn soak_safety_3000_seeds() {
    let cfg = GeneratorConfig::default();
    let failures: Vec<u64> = (1000..4000u64)
        .into_par_iter()
        .filter(|&seed| {
            let g = random_scenario(seed, &cfg);
            let result = match run(&g.scenario) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("seed {seed}: run error {e}");
                    return true;
                }
            };
            let audit =
                compile_schedule(&g.audit_formula, &g.audit_world, g.scenario.horizon).unwrap();
            !check_safety(&result.trajectory, &audit).safe
        })
        .collect();
    assert!(failures.is_empty(), "unsafe seeds: {failures:?}");
}
