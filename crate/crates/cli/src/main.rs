//! `stlshield`: compile restricted STL specifications into harmonic
//! potential fields, shield nominal policies with the barrier filter, and
//! audit the recorded runs.

mod exit;

use clap::{Args, Parser, Subcommand};
use exit::CliError;
use std::path::{Path, PathBuf};
use stlshield::field::{
    compile_schedule, solve, solve_schedule, CellState, GridDims, Method, OccupancyGrid,
    SolverParams, WorldSpec,
};
use stlshield::geom::Rect;
use stlshield::io::{
    export_field, load_scenario, read_signal_csv, render_ppm, render_svg, save_qtable,
    write_trajectory_csv,
};
use stlshield::policy::{q_train, QHyper, RewardParams, ShieldedTraining};
use stlshield::sim::{barrier_decrease_audit, check_safety, run, TOL_AUDIT};
use stlshield::stl::{monitor, parse, MonitorError, StlFormula, TemporalOp};

const SCHEMA_HELP: &str = "\
EXIT CODES:
    0  success
    1  unexpected error (I/O, internal)
    2  specification rejected (syntax error or fragment violation) or horizon mismatch
    3  an input file was not found
    4  the relaxation solver did not converge
    5  an epoch has no goal cell (or overlapping F regions are disjoint)
    6  verification failed (trajectory violates the formula)
    7  scenario invalid (bad timing, start in collision)

SCENARIO FILE (JSON):
    {
      \"bounds\":    {\"x_min\": -1, \"x_max\": 1, \"y_min\": -1, \"y_max\": 1},
      \"grid\":      {\"width\": 50, \"height\": 50},
      \"obstacles\": [{\"x_min\": ..., \"x_max\": ..., \"y_min\": ..., \"y_max\": ...}],
      \"goal\":      {...},                          # optional static goal rectangle
      \"formula\":   \"G[0,20](x >= -0.8 & !(x > 0.8))\",
      \"solver\":    {\"method\": \"sor\", \"omega\": 1.8, \"tol\": 1e-6,
                    \"max_iters\": 50000, \"sweep\": \"forward\"},
      \"filter\":    {\"k_alpha\": 1.0, \"alpha_adm\": 0.1, \"grad_epsilon\": 1e-9,
                    \"speed_limit\": null},
      \"sim\":       {\"horizon\": 20.0, \"dt\": 0.05, \"start\": {\"x\": 0, \"y\": 0},
                    \"flat_stop_ticks\": 10, \"filter_enabled\": true, \"seed\": 0},
      \"policy\":    {\"kind\": \"goal-seek\", \"goal\": {\"x\": ..., \"y\": ...},
                    \"gain\": 1.0, \"noise_eps\": 0.0}
                   | {\"kind\": \"adversarial\"}
                   | {\"kind\": \"q-table\", \"path\": \"table.json\"}
                   | {\"kind\": \"replay\", \"path\": \"forces.csv\"}
    }

FORMULA GRAMMAR (one formula, '#' starts a line comment):
    formula := tconj ('&' tconj)*
    tconj   := ('G'|'F') '[' num ',' num ']' '(' lit ('&' lit)* ')'
    lit     := ['!'] '(' atom ')' | ['!'] atom
    atom    := ('x'|'y') ('>='|'>'|'=') num

TRAJECTORY CSV COLUMNS:
    t,x,y,fx,fy,ux_nom,uy_nom,V,gx,gy,lhs,rhs,violated,ux_out,uy_out,flags,epoch
    (flags: subset of P=projected, F=flat-gradient stop, C=clamped, or '-')

FIELD EXPORT: <out>_epoch<k>.json (dims, bounds, epoch, stats) plus
    <out>_epoch<k>.csv, V values row-major, one grid row per line.

BENCH CSV COLUMNS: size,method,tol,iterations,wall_time_s,converged";

#[derive(Parser)]
#[command(
    name = "stlshield",
    about = "Safety filters from restricted STL specifications via harmonic potential fields",
    after_long_help = SCHEMA_HELP,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Chatty diagnostics on stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Args)]
struct SpecSource {
    /// Read the formula from a file.
    #[arg(long, value_name = "PATH", conflicts_with = "spec_text")]
    spec: Option<PathBuf>,
    /// Give the formula inline.
    #[arg(long, value_name = "TEXT")]
    spec_text: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a specification; print its canonical form.
    Check {
        #[command(flatten)]
        source: SpecSource,
    },
    /// Solve the potential field for every epoch and export it.
    Solve {
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        /// Output stem; files are <out>_epoch<k>.{json,csv}.
        #[arg(long, value_name = "STEM")]
        out: PathBuf,
        /// Also export the gradient component grids.
        #[arg(long)]
        gradients: bool,
    },
    /// Render per-epoch heatmaps (PPM) and descent-arrow plots (SVG).
    Render {
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        /// Output stem; files are <out>_epoch<k>.{ppm,svg}.
        #[arg(long, value_name = "STEM")]
        out: PathBuf,
        /// Draw one arrow every N cells.
        #[arg(long, value_name = "N", default_value_t = 4)]
        arrow_stride: usize,
    },
    /// Execute a scenario; write trajectory CSV and summary JSON.
    Run {
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        /// Output directory for trajectory.csv and summary.json.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replay a trajectory CSV against a formula.
    Verify {
        #[arg(long, value_name = "PATH")]
        traj: PathBuf,
        #[command(flatten)]
        source: SpecSource,
        /// Take the formula from a scenario file instead.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["spec", "spec_text"])]
        scenario: Option<PathBuf>,
    },
    /// Train a tabular Q policy on the scenario's static world.
    Train {
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        #[arg(long, default_value_t = 5000)]
        episodes: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Filter exploration moves through the barrier certificate.
        #[arg(long)]
        shielded_training: bool,
        #[arg(long, default_value_t = 0.95)]
        gamma: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha_lr: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Sweep grid sizes x methods x tolerances; write iteration counts.
    Bench {
        /// Comma-separated grid side lengths.
        #[arg(long, value_delimiter = ',', default_value = "25,51,101")]
        sizes: Vec<usize>,
        /// Comma-separated convergence tolerances.
        #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-6")]
        tols: Vec<f64>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.code());
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Check { source } => cmd_check(&source),
        Command::Solve { scenario, out, gradients } => cmd_solve(&scenario, &out, gradients),
        Command::Render { scenario, out, arrow_stride } => {
            cmd_render(&scenario, &out, arrow_stride)
        }
        Command::Run { scenario, out, seed } => cmd_run(&scenario, &out, seed, cli.verbose),
        Command::Verify { traj, source, scenario } => {
            cmd_verify(&traj, &source, scenario.as_deref())
        }
        Command::Train {
            scenario,
            out,
            episodes,
            seed,
            shielded_training,
            gamma,
            alpha_lr,
            epsilon,
        } => cmd_train(
            &scenario,
            &out,
            episodes,
            seed,
            shielded_training,
            QHyper { gamma, alpha_lr, epsilon },
        ),
        Command::Bench { sizes, tols, out } => cmd_bench(&sizes, &tols, &out),
    }
}

fn read_spec(source: &SpecSource) -> Result<String, CliError> {
    match (&source.spec, &source.spec_text) {
        (Some(path), None) => {
            std::fs::read_to_string(path).map_err(|e| CliError::input_file(path, e))
        }
        (None, Some(text)) => Ok(text.clone()),
        _ => Err(CliError::Usage("give exactly one of --spec or --spec-text".into())),
    }
}

fn cmd_check(source: &SpecSource) -> Result<i32, CliError> {
    let text = read_spec(source)?;
    let formula = parse(&text)?;
    for warning in formula.eq_atom_warnings() {
        eprintln!("warning: {warning}");
    }
    println!("{}", formula.pretty());
    Ok(0)
}

fn cmd_solve(scenario: &Path, out: &Path, gradients: bool) -> Result<i32, CliError> {
    let sc = load_scenario(scenario)?;
    let schedule = compile_schedule(&sc.formula, &sc.world, sc.horizon)?;
    let fields = solve_schedule(&schedule, &sc.solver)?;
    for epoch_field in &fields {
        let export = export_field(epoch_field, out, gradients)?;
        let stats = epoch_field.field.stats();
        eprintln!(
            "epoch {} [{}, {}]: {} sweeps, residual {:.3e}, {:.1} ms -> {}",
            epoch_field.epoch_index,
            epoch_field.t_start,
            epoch_field.t_end,
            stats.iterations,
            stats.final_residual,
            stats.wall_time_s * 1e3,
            export.values.display(),
        );
    }
    Ok(0)
}

fn cmd_render(scenario: &Path, out: &Path, arrow_stride: usize) -> Result<i32, CliError> {
    let sc = load_scenario(scenario)?;
    let schedule = compile_schedule(&sc.formula, &sc.world, sc.horizon)?;
    let fields = solve_schedule(&schedule, &sc.solver)?;
    for epoch_field in &fields {
        let ppm_path = out.with_file_name(format!(
            "{}_epoch{}.ppm",
            out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            epoch_field.epoch_index
        ));
        let svg_path = ppm_path.with_extension("svg");
        std::fs::write(&ppm_path, render_ppm(&epoch_field.field))
            .map_err(|e| CliError::output(&ppm_path, e))?;
        std::fs::write(&svg_path, render_svg(&epoch_field.field, arrow_stride))
            .map_err(|e| CliError::output(&svg_path, e))?;
        eprintln!("epoch {}: {} + {}", epoch_field.epoch_index, ppm_path.display(), svg_path.display());
    }
    Ok(0)
}

fn cmd_run(scenario: &Path, out: &Path, seed: Option<u64>, verbose: bool) -> Result<i32, CliError> {
    let mut sc = load_scenario(scenario)?;
    if let Some(seed) = seed {
        sc.seed = seed;
    }
    let result = run(&sc)?;

    std::fs::create_dir_all(out).map_err(|e| CliError::output(out, e))?;
    let traj_path = out.join("trajectory.csv");
    write_trajectory_csv(&result.trajectory, &traj_path)?;

    let safety = check_safety(&result.trajectory, &result.schedule);
    let audit = barrier_decrease_audit(&result.trajectory, sc.filter.k_alpha, TOL_AUDIT);
    let monitor_verdict = result
        .trajectory
        .signal()
        .ok()
        .and_then(|signal| monitor(&sc.formula, &signal).ok());

    let traj = &result.trajectory;
    let final_position = traj.steps.last().map(|s| s.next_position).unwrap_or(sc.start);
    let summary = serde_json::json!({
        "outcome": traj.outcome.to_string(),
        "steps": traj.steps.len(),
        "seed": sc.seed,
        "final_position": final_position,
        "projected_steps": traj.projected_steps(),
        "flat_stop_steps": traj.steps.iter().filter(|s| s.decision.flags.flat_stop).count(),
        "safe": safety.safe,
        "first_violation": safety.first_violation.map(|(t, cell)| {
            serde_json::json!({"t": t, "cell": [cell.0, cell.1]})
        }),
        "barrier_audit": {
            "violations": audit.violations.len(),
            "max_ratio": audit.max_ratio,
            "flat_stalled": audit.flat_stalled,
        },
        "monitor": monitor_verdict.map(|v| serde_json::json!({
            "satisfied": v.satisfied,
            "per_conjunct": v.per_conjunct.iter().map(|c| serde_json::json!({
                "index": c.index, "satisfied": c.satisfied, "time": c.time,
            })).collect::<Vec<_>>(),
        })),
        "epochs": result.fields.iter().map(|f| serde_json::json!({
            "index": f.epoch_index,
            "t_start": f.t_start,
            "t_end": f.t_end,
            "iterations": f.field.stats().iterations,
            "final_residual": f.field.stats().final_residual,
            "wall_time_s": f.field.stats().wall_time_s,
        })).collect::<Vec<_>>(),
    });
    let summary_text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    let summary_path = out.join("summary.json");
    std::fs::write(&summary_path, format!("{summary_text}\n"))
        .map_err(|e| CliError::output(&summary_path, e))?;
    println!("{summary_text}");
    if verbose {
        eprintln!("wrote {} and {}", traj_path.display(), summary_path.display());
    }
    Ok(0)
}

fn cmd_verify(
    traj: &Path,
    source: &SpecSource,
    scenario: Option<&Path>,
) -> Result<i32, CliError> {
    let formula = match scenario {
        Some(path) => load_scenario(path)?.formula,
        None => parse(&read_spec(source)?)?,
    };
    let signal = read_signal_csv(traj)?;

    match monitor(&formula, &signal) {
        Ok(verdict) => {
            for c in &verdict.per_conjunct {
                println!(
                    "conjunct {}: {}{}",
                    c.index,
                    if c.satisfied { "satisfied" } else { "violated" },
                    c.time.map(|t| format!(" at t={t}")).unwrap_or_default(),
                );
            }
            Ok(if verdict.satisfied { 0 } else { 6 })
        }
        Err(MonitorError::HorizonTooShort { .. }) => {
            // Recordings legitimately end early (goal reached, flat stop).
            // Always windows clip to the recorded prefix; an unwitnessed
            // eventually window cannot be decided and counts as violated.
            let end = signal.end_time();
            let mut all_ok = true;
            for (index, c) in formula.conjuncts.iter().enumerate() {
                let ok = clipped_conjunct_ok(c, &signal, end);
                println!(
                    "conjunct {index}: {} (recording ends at t={end})",
                    if ok { "satisfied on recorded prefix" } else { "not verifiable" }
                );
                all_ok &= ok;
            }
            Ok(if all_ok { 0 } else { 6 })
        }
    }
}

fn clipped_conjunct_ok(
    c: &stlshield::stl::TemporalConjunct,
    signal: &stlshield::stl::Signal,
    end: f64,
) -> bool {
    match c.op {
        TemporalOp::Always => {
            let mut clipped = c.clone();
            clipped.window.1 = clipped.window.1.min(end);
            if clipped.window.1 <= clipped.window.0 {
                return true; // nothing recorded inside the window
            }
            monitor(&StlFormula { conjuncts: vec![clipped] }, signal)
                .map(|v| v.satisfied)
                .unwrap_or(false)
        }
        TemporalOp::Eventually => {
            // Satisfied only if a witness already occurred in the recording.
            let mut clipped = c.clone();
            clipped.window.1 = clipped.window.1.min(end);
            clipped.window.0 <= end
                && clipped.window.1 > clipped.window.0
                && monitor(&StlFormula { conjuncts: vec![clipped] }, signal)
                    .map(|v| v.satisfied)
                    .unwrap_or(false)
        }
    }
}

fn cmd_train(
    scenario: &Path,
    out: &Path,
    episodes: usize,
    seed: Option<u64>,
    shielded: bool,
    hyper: QHyper,
) -> Result<i32, CliError> {
    let sc = load_scenario(scenario)?;
    let goal_rect = sc.world.goal.ok_or_else(|| {
        CliError::Usage("training needs a goal rectangle in the scenario world".into())
    })?;
    let reward = RewardParams { goal: goal_rect.center(), ..Default::default() };
    let seed = seed.unwrap_or(sc.seed);

    let table = if shielded {
        let occ = sc.world.static_occupancy();
        let field = solve(&occ, &sc.solver)?;
        let shield = ShieldedTraining { field: &field, params: &sc.filter };
        q_train(&sc.world, &reward, hyper, episodes, seed, Some(&shield))?
    } else {
        q_train(&sc.world, &reward, hyper, episodes, seed, None)?
    };
    save_qtable(&table, out)?;
    eprintln!(
        "trained {} episodes (seed {seed}, shielded: {shielded}); {} visited cells -> {}",
        episodes,
        table.values.len(),
        out.display()
    );
    Ok(0)
}

fn cmd_bench(sizes: &[usize], tols: &[f64], out: &Path) -> Result<i32, CliError> {
    let mut csv = String::from("size,method,tol,iterations,wall_time_s,converged\n");
    for &size in sizes {
        if size < 3 {
            return Err(CliError::Usage(format!("grid size {size} is below the 3-cell minimum")));
        }
        let world = WorldSpec {
            bounds: Rect::new(-1.0, 1.0, -1.0, 1.0),
            grid: GridDims { width: size, height: size },
            obstacles: vec![],
            goal: None,
        };
        let mut occ = OccupancyGrid::free(world.transform());
        occ.close_border();
        occ.set(size / 2, size / 2, CellState::Goal);
        for method in [Method::Jacobi, Method::GaussSeidel, Method::Sor] {
            for &tol in tols {
                let params = SolverParams { method, tol, ..Default::default() };
                let (iterations, wall, converged) = match solve(&occ, &params) {
                    Ok(field) => {
                        let s = field.stats();
                        (s.iterations, s.wall_time_s, true)
                    }
                    Err(stlshield::field::SolveError::NonConverged { stats }) => {
                        (stats.iterations, stats.wall_time_s, false)
                    }
                    Err(other) => return Err(other.into()),
                };
                csv.push_str(&format!("{size},{method},{tol},{iterations},{wall},{converged}\n"));
                eprintln!("{size:>4} {method:<13} tol {tol:>8}: {iterations} sweeps");
            }
        }
    }
    std::fs::write(out, csv).map_err(|e| CliError::output(out, e))?;
    Ok(0)
}
