//! Nominal force policies for the filter to wrap: scripted baselines, a
//! file-backed replay, and a desk-scale tabular Q-learning trainer.

mod qlearn;

pub use qlearn::{
    policy_q, q_train, QHyper, QPolicyForce, QTable, QTrainError, ShieldedTraining, ACTIONS,
};

use crate::geom::Vec2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Kinematic state the policies observe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyState {
    pub position: Vec2,
    pub velocity: Vec2,
}

/// Proportional pull toward the goal, clipped to unit force magnitude.
pub fn goal_seek(state: &PolicyState, goal: Vec2, gain: f64) -> Vec2 {
    ((goal - state.position) * gain).clamp_norm(1.0)
}

/// Unit force toward the nearest unsafe cell center, the worst admissible
/// nominal input. Ties break to the lowest cell index; with no unsafe cells
/// the force is zero.
pub fn adversarial(position: Vec2, unsafe_centers: &[(Vec2, usize)]) -> Vec2 {
    let mut best: Option<(f64, Vec2)> = None;
    for (center, _index) in unsafe_centers {
        let d = position.distance(*center);
        // strict comparison keeps the first (lowest-index) entry on ties
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, *center));
        }
    }
    match best {
        Some((_, target)) => (target - position).normalized(),
        None => Vec2::ZERO,
    }
}

/// Reward shaping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardParams {
    pub step_penalty: f64,
    pub success_bonus: f64,
    pub oob_penalty: f64,
    pub goal: Vec2,
}

impl Default for RewardParams {
    fn default() -> Self {
        Self { step_penalty: 0.01, success_bonus: 10.0, oob_penalty: -10.0, goal: Vec2::ZERO }
    }
}

/// Dense shaping signal: negative goal distance minus a step penalty, plus
/// the success bonus at the goal and the out-of-bounds penalty off it.
pub fn reward(state: &PolicyState, params: &RewardParams, in_bounds: bool, at_goal: bool) -> f64 {
    let mut r = -state.position.distance(params.goal) - params.step_penalty;
    if at_goal {
        r += params.success_bonus;
    }
    if !in_bounds {
        r += params.oob_penalty;
    }
    r
}

/// A recorded per-step force sequence. Steps beyond the recording are zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReplayPolicy {
    forces: Vec<Vec2>,
}

impl ReplayPolicy {
    pub fn new(forces: Vec<Vec2>) -> Self {
        Self { forces }
    }

    pub fn force_at(&self, step: usize) -> Vec2 {
        self.forces.get(step).copied().unwrap_or(Vec2::ZERO)
    }

    pub fn len(&self) -> usize {
        self.forces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forces.is_empty()
    }
}

/// A nominal policy bound to its runtime context, dispatched per tick.
#[derive(Debug, Clone)]
pub enum NominalPolicy {
    GoalSeek {
        goal: Vec2,
        gain: f64,
        /// Probability per tick of replacing the force with a random unit
        /// direction.
        noise_eps: f64,
    },
    /// Heads for the nearest unsafe cell of the epoch-0 occupancy.
    Adversarial { unsafe_centers: Vec<(Vec2, usize)> },
    Q { table: QTable },
    Replay(ReplayPolicy),
}

impl NominalPolicy {
    pub fn force(&self, state: &PolicyState, step: usize, rng: &mut ChaCha8Rng) -> Vec2 {
        match self {
            NominalPolicy::GoalSeek { goal, gain, noise_eps } => {
                if *noise_eps > 0.0 && rng.gen::<f64>() < *noise_eps {
                    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                    Vec2::new(theta.cos(), theta.sin())
                } else {
                    goal_seek(state, *goal, *gain)
                }
            }
            NominalPolicy::Adversarial { unsafe_centers } => {
                adversarial(state.position, unsafe_centers)
            }
            NominalPolicy::Q { table } => policy_q(state, table).force,
            NominalPolicy::Replay(replay) => replay.force_at(step),
        }
    }
}
