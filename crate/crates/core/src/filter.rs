//! The per-step safety certificate: map nominal forces to velocities through
//! the admittance gain, test the barrier inequality
//! `grad(V)ᵀ u <= -k_alpha * V` against the sampled field, and minimally
//! project violating commands onto the safe half-space.

use crate::geom::Vec2;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Gains of the safety filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    /// Barrier gain `k_alpha > 0` (1/s): required exponential decay rate
    /// of `V` along trajectories.
    pub k_alpha: f64,
    /// Admittance gain (velocity per force unit): `u = alpha_adm * F`.
    pub alpha_adm: f64,
    /// Below this gradient norm the constraint direction is numerically
    /// undefined and the filter commands a full stop.
    pub grad_epsilon: f64,
    /// Optional speed cap applied after projection, only when the capped
    /// command still satisfies the constraint. Off by default.
    pub speed_limit: Option<f64>,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self { k_alpha: 1.0, alpha_adm: 0.1, grad_epsilon: 1e-9, speed_limit: None }
    }
}

/// Flags a decision can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecisionFlags {
    /// The nominal command violated the barrier and was projected.
    pub projected: bool,
    /// Gradient below `grad_epsilon` with the barrier violated: full stop.
    pub flat_stop: bool,
    /// The speed cap shrank the output.
    pub clamped: bool,
}

impl DecisionFlags {
    pub fn is_empty(&self) -> bool {
        !(self.projected || self.flat_stop || self.clamped)
    }
}

impl fmt::Display for DecisionFlags {
    /// Compact CSV encoding: subset of `P`, `F`, `C`, or `-` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "-");
        }
        if self.projected {
            write!(f, "P")?;
        }
        if self.flat_stop {
            write!(f, "F")?;
        }
        if self.clamped {
            write!(f, "C")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for DecisionFlags {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut flags = DecisionFlags::default();
        if s == "-" {
            return Ok(flags);
        }
        for ch in s.chars() {
            match ch {
                'P' => flags.projected = true,
                'F' => flags.flat_stop = true,
                'C' => flags.clamped = true,
                other => return Err(format!("unknown flag '{other}'")),
            }
        }
        Ok(flags)
    }
}

/// Everything the filter decided on one step, for logging and audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterDecision {
    pub nominal_u: Vec2,
    pub v: f64,
    pub grad: Vec2,
    /// `grad ᵀ nominal_u`.
    pub lhs: f64,
    /// `-k_alpha * V`.
    pub rhs: f64,
    pub violated: bool,
    pub output_u: Vec2,
    pub flags: DecisionFlags,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FilterError {
    #[error("non-finite filter input: u={u:?}, v={v}, grad={grad:?}")]
    NonFiniteInput { u: Vec2, v: f64, grad: Vec2 },
}

/// Admittance map: commanded force to velocity, `u = alpha_adm * F`.
/// Direction is preserved.
pub fn admittance(force: Vec2, alpha_adm: f64) -> Vec2 {
    force * alpha_adm
}

/// Both sides of the barrier inequality, for logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierCheck {
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Evaluate `grad ᵀ u <= -k_alpha * V`.
pub fn check_barrier(u: Vec2, v: f64, grad: Vec2, k_alpha: f64) -> BarrierCheck {
    let lhs = grad.dot(u);
    let rhs = -k_alpha * v;
    BarrierCheck { satisfied: lhs <= rhs, lhs, rhs }
}

/// Accept the nominal command if it satisfies the barrier, otherwise replace
/// it with the closest safe one.
///
/// The projection problem `min ||u' - u||^2 s.t. grad ᵀ u' <= rhs` over a
/// single half-space has the closed form
/// `u* = u - ((grad ᵀ u - rhs) / |grad|^2) grad`, which meets the constraint
/// with equality. When the gradient is numerically degenerate
/// (`|grad| <= grad_epsilon`) there is no usable constraint direction and the
/// output is a full stop with the `flat_stop` flag set.
pub fn project(u: Vec2, v: f64, grad: Vec2, params: &FilterParams) -> Result<FilterDecision, FilterError> {
    if !u.is_finite() || !v.is_finite() || !grad.is_finite() {
        return Err(FilterError::NonFiniteInput { u, v, grad });
    }
    let check = check_barrier(u, v, grad, params.k_alpha);
    let mut decision = FilterDecision {
        nominal_u: u,
        v,
        grad,
        lhs: check.lhs,
        rhs: check.rhs,
        violated: !check.satisfied,
        output_u: u,
        flags: DecisionFlags::default(),
    };
    if !check.satisfied {
        if grad.norm() <= params.grad_epsilon {
            decision.output_u = Vec2::ZERO;
            decision.flags.flat_stop = true;
        } else {
            let excess = check.lhs - check.rhs;
            decision.output_u = u - grad * (excess / grad.norm_sq());
            decision.flags.projected = true;
        }
    }
    if let Some(cap) = params.speed_limit {
        if !decision.flags.flat_stop && decision.output_u.norm() > cap {
            let capped = decision.output_u.clamp_norm(cap);
            // Shrinking scales the lhs toward zero, which stays feasible
            // only while it remains below rhs; when the constraint is
            // active (rhs < 0) safety wins over the cap.
            if grad.dot(capped) <= check.rhs + 1e-12 {
                decision.output_u = capped;
                decision.flags.clamped = true;
            }
        }
    }
    Ok(decision)
}
