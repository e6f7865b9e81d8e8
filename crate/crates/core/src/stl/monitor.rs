use super::ast::{StlFormula, TemporalOp};
use crate::geom::Vec2;
use thiserror::Error;

/// A uniformly sampled planar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<(f64, Vec2)>,
    period: f64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SignalError {
    #[error("a signal needs at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("timestamps must be strictly increasing (samples {0} and {1})")]
    NonIncreasing(usize, usize),
    #[error("non-uniform sample spacing at sample {index}: {actual} vs period {period}")]
    NonUniform { index: usize, actual: f64, period: f64 },
    #[error("sample period must be positive, got {0}")]
    BadPeriod(f64),
}

impl Signal {
    /// Validate an explicit sample list: strictly increasing timestamps with
    /// uniform spacing (1e-9 relative tolerance).
    pub fn new(samples: Vec<(f64, Vec2)>) -> Result<Self, SignalError> {
        if samples.len() < 2 {
            return Err(SignalError::TooShort(samples.len()));
        }
        let period = samples[1].0 - samples[0].0;
        if !(period > 0.0) {
            return Err(SignalError::NonIncreasing(0, 1));
        }
        for i in 1..samples.len() {
            let dt = samples[i].0 - samples[i - 1].0;
            if !(dt > 0.0) {
                return Err(SignalError::NonIncreasing(i - 1, i));
            }
            if (dt - period).abs() > 1e-9 * period.max(1.0) {
                return Err(SignalError::NonUniform { index: i, actual: dt, period });
            }
        }
        Ok(Self { samples, period })
    }

    /// Build from positions sampled at `t = start + k * period`.
    pub fn uniform(start: f64, period: f64, points: Vec<Vec2>) -> Result<Self, SignalError> {
        if !(period > 0.0) {
            return Err(SignalError::BadPeriod(period));
        }
        if points.len() < 2 {
            return Err(SignalError::TooShort(points.len()));
        }
        let samples = points
            .into_iter()
            .enumerate()
            .map(|(k, p)| (start + k as f64 * period, p))
            .collect();
        Ok(Self { samples, period })
    }

    pub fn samples(&self) -> &[(f64, Vec2)] {
        &self.samples
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Time of the last sample.
    pub fn end_time(&self) -> f64 {
        self.samples.last().expect("nonempty").0
    }
}

/// Verdict for one temporal conjunct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjunctVerdict {
    pub index: usize,
    pub satisfied: bool,
    /// First satisfying sample time for `F`, first violating sample time
    /// for `G`; `None` when no such sample exists.
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorVerdict {
    pub satisfied: bool,
    pub per_conjunct: Vec<ConjunctVerdict>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MonitorError {
    #[error("signal ends at t={end} but conjunct {index} needs coverage up to t={t2}")]
    HorizonTooShort { index: usize, t2: f64, end: f64 },
}

/// Decide satisfaction of `formula` on a recorded signal, evaluated at t=0.
///
/// Satisfaction is sample-based: `G[t1,t2]` holds iff the body holds at every
/// sample inside the window, `F[t1,t2]` iff it holds at some sample. Window
/// membership uses half-a-period slack on both ends so that float drift on
/// tick timestamps cannot flip a verdict.
pub fn monitor(formula: &StlFormula, signal: &Signal) -> Result<MonitorVerdict, MonitorError> {
    let eps = 0.5 * signal.period();
    let end = signal.end_time();
    for (index, c) in formula.conjuncts.iter().enumerate() {
        if end + eps < c.window.1 {
            return Err(MonitorError::HorizonTooShort { index, t2: c.window.1, end });
        }
    }

    let mut per_conjunct = Vec::with_capacity(formula.conjuncts.len());
    let mut satisfied = true;
    for (index, c) in formula.conjuncts.iter().enumerate() {
        let (t1, t2) = c.window;
        let in_window = signal
            .samples()
            .iter()
            .filter(|(t, _)| *t >= t1 - eps && *t <= t2 + eps);
        let verdict = match c.op {
            TemporalOp::Always => {
                let violation = in_window
                    .clone()
                    .find(|(_, p)| !c.body_holds(p.x, p.y))
                    .map(|(t, _)| *t);
                ConjunctVerdict { index, satisfied: violation.is_none(), time: violation }
            }
            TemporalOp::Eventually => {
                let witness = in_window
                    .clone()
                    .find(|(_, p)| c.body_holds(p.x, p.y))
                    .map(|(t, _)| *t);
                ConjunctVerdict { index, satisfied: witness.is_some(), time: witness }
            }
        };
        satisfied &= verdict.satisfied;
        per_conjunct.push(verdict);
    }
    Ok(MonitorVerdict { satisfied, per_conjunct })
}
