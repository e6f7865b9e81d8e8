use super::{goal_seek, reward, PolicyState, RewardParams};
use crate::field::{CellState, GridTransform, PotentialField, WorldSpec};
use crate::filter::{project, FilterParams};
use crate::geom::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

const DIAG: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The fixed action set: 8 unit-magnitude compass forces. Greedy ties break
/// to the lowest index, so action 0 (+x) is the canonical default.
pub const ACTIONS: [Vec2; 8] = [
    Vec2 { x: 1.0, y: 0.0 },
    Vec2 { x: DIAG, y: DIAG },
    Vec2 { x: 0.0, y: 1.0 },
    Vec2 { x: -DIAG, y: DIAG },
    Vec2 { x: -1.0, y: 0.0 },
    Vec2 { x: -DIAG, y: -DIAG },
    Vec2 { x: 0.0, y: -1.0 },
    Vec2 { x: DIAG, y: -DIAG },
];

/// Offset of each action in grid cells.
const ACTION_STEPS: [(isize, isize); 8] =
    [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QHyper {
    /// Discount factor in (0, 1].
    pub gamma: f64,
    /// Learning rate in (0, 1].
    pub alpha_lr: f64,
    /// Exploration probability in [0, 1].
    pub epsilon: f64,
}

impl Default for QHyper {
    fn default() -> Self {
        Self { gamma: 0.95, alpha_lr: 0.1, epsilon: 0.1 }
    }
}

/// Tabular action values over the cell-discretized world. Cells the training
/// never visited are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    pub transform: GridTransform,
    pub actions: Vec<Vec2>,
    /// Flat cell index -> per-action values. A BTreeMap keeps serialization
    /// order deterministic.
    pub values: BTreeMap<usize, [f64; 8]>,
    pub hyperparams: QHyper,
    pub seed: u64,
    /// Goal the table was trained for; also the fallback target for
    /// unvisited cells.
    pub goal: Vec2,
}

impl QTable {
    pub fn cell_of(&self, position: Vec2) -> usize {
        let (i, j) = self.transform.nearest_cell(position);
        j * self.transform.dims.width + i
    }

    /// Greedy action index at a cell, ties to the lowest index.
    pub fn greedy_action(values: &[f64; 8]) -> usize {
        let mut best = 0;
        for (k, v) in values.iter().enumerate().skip(1) {
            if *v > values[best] {
                best = k;
            }
        }
        best
    }
}

/// Force chosen by the greedy policy, with the fallback marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPolicyForce {
    pub force: Vec2,
    /// The current cell was never visited during training; the force came
    /// from the goal-seek fallback instead.
    pub fallback: bool,
}

/// Unit force along the argmax action of the current cell. Unvisited cells
/// fall back to goal-seek toward the table's goal, flagged.
pub fn policy_q(state: &PolicyState, table: &QTable) -> QPolicyForce {
    let cell = table.cell_of(state.position);
    match table.values.get(&cell) {
        Some(values) => {
            QPolicyForce { force: ACTIONS[QTable::greedy_action(values)], fallback: false }
        }
        None => QPolicyForce { force: goal_seek(state, table.goal, 1.0), fallback: true },
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QTrainError {
    #[error("episodes must be >= 1")]
    NoEpisodes,
    #[error("hyperparameter out of range: {0}")]
    BadHyper(String),
    #[error("the world has no free cell to start from")]
    NoFreeCell,
    #[error(transparent)]
    World(#[from] crate::field::WorldError),
}

/// Shield applied to exploration moves when training runs in shielded mode.
pub struct ShieldedTraining<'a> {
    pub field: &'a PotentialField,
    pub params: &'a FilterParams,
}

/// Tabular Q-learning on the cell-discretized world.
///
/// State is the grid cell, actions are the 8 unit directions, and a move
/// into an unsafe cell (or off the grid) is blocked: the agent stays put and
/// collects the out-of-bounds penalty. Episodes start in uniformly random
/// free cells and end at a goal cell or after a step cap. The behavior
/// policy is epsilon-greedy; everything is driven by one seeded generator,
/// so a seed fixes the table bit for bit.
///
/// With `shield` set, each exploration move is admittance-mapped, filtered
/// against the barrier certificate, and re-discretized before execution, so
/// the explorer never commits an unsafe transition.
pub fn q_train(
    world: &WorldSpec,
    reward_params: &RewardParams,
    hyper: QHyper,
    episodes: usize,
    seed: u64,
    shield: Option<&ShieldedTraining<'_>>,
) -> Result<QTable, QTrainError> {
    if episodes == 0 {
        return Err(QTrainError::NoEpisodes);
    }
    if !(hyper.gamma > 0.0 && hyper.gamma <= 1.0) {
        return Err(QTrainError::BadHyper(format!("gamma {} not in (0,1]", hyper.gamma)));
    }
    if !(hyper.alpha_lr > 0.0 && hyper.alpha_lr <= 1.0) {
        return Err(QTrainError::BadHyper(format!("alpha_lr {} not in (0,1]", hyper.alpha_lr)));
    }
    if !(0.0..=1.0).contains(&hyper.epsilon) {
        return Err(QTrainError::BadHyper(format!("epsilon {} not in [0,1]", hyper.epsilon)));
    }
    world.validate()?;

    let occ = world.static_occupancy();
    let transform = *occ.transform();
    let (w, h) = (occ.width(), occ.height());
    let free_cells: Vec<(usize, usize)> = (0..h)
        .flat_map(|j| (0..w).map(move |i| (i, j)))
        .filter(|&(i, j)| occ.get(i, j) == CellState::Free)
        .collect();
    if free_cells.is_empty() {
        return Err(QTrainError::NoFreeCell);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: BTreeMap<usize, [f64; 8]> = BTreeMap::new();
    let max_steps = 8 * (w + h);

    for _ in 0..episodes {
        let (mut ci, mut cj) = free_cells[rng.gen_range(0..free_cells.len())];
        for _ in 0..max_steps {
            let cell = cj * w + ci;
            let q = *values.entry(cell).or_insert([0.0; 8]);
            let action = if rng.gen::<f64>() < hyper.epsilon {
                rng.gen_range(0..8)
            } else {
                QTable::greedy_action(&q)
            };

            let executed = match shield {
                None => Some(action),
                Some(s) => shield_action(action, transform.cell_center(ci, cj), s),
            };

            // Transition: blocked moves (unsafe target or shielded stop that
            // resolves to no move) keep the agent in place.
            let (ni, nj, in_bounds) = match executed {
                Some(a) => {
                    let (di, dj) = ACTION_STEPS[a];
                    let ti = ci as isize + di;
                    let tj = cj as isize + dj;
                    if ti < 0 || tj < 0 || ti >= w as isize || tj >= h as isize {
                        (ci, cj, false)
                    } else {
                        let (ti, tj) = (ti as usize, tj as usize);
                        if occ.get(ti, tj) == CellState::Unsafe {
                            (ci, cj, false)
                        } else {
                            (ti, tj, true)
                        }
                    }
                }
                None => (ci, cj, true),
            };

            let next_cell = nj * w + ni;
            let at_goal = occ.get(ni, nj) == CellState::Goal;
            let next_state = PolicyState {
                position: transform.cell_center(ni, nj),
                velocity: Vec2::ZERO,
            };
            let r = reward(&next_state, reward_params, in_bounds, at_goal);

            let bootstrap = if at_goal {
                0.0
            } else {
                let next_q = values.entry(next_cell).or_insert([0.0; 8]);
                next_q[QTable::greedy_action(next_q)]
            };
            let entry = values.get_mut(&cell).expect("inserted above");
            entry[action] += hyper.alpha_lr * (r + hyper.gamma * bootstrap - entry[action]);

            if at_goal {
                break;
            }
            (ci, cj) = (ni, nj);
        }
    }

    Ok(QTable {
        transform,
        actions: ACTIONS.to_vec(),
        values,
        hyperparams: hyper,
        seed,
        goal: reward_params.goal,
    })
}

/// Run one exploration move through the barrier filter and re-discretize.
/// `None` means the filtered velocity is too small to commit to any move.
fn shield_action(action: usize, position: Vec2, shield: &ShieldedTraining<'_>) -> Option<usize> {
    let u_nom = ACTIONS[action] * shield.params.alpha_adm;
    let s = shield.field.sample(position);
    let decision = project(u_nom, s.v, s.grad, shield.params).ok()?;
    let u = decision.output_u;
    if u.norm() < 1e-6 * shield.params.alpha_adm.max(1e-12) {
        return None;
    }
    let dir = u.normalized();
    let mut best = 0;
    let mut best_dot = f64::NEG_INFINITY;
    for (k, a) in ACTIONS.iter().enumerate() {
        let d = a.dot(dir);
        if d > best_dot {
            best_dot = d;
            best = k;
        }
    }
    Some(best)
}
