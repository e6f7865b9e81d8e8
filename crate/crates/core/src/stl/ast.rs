use serde::{Deserialize, Serialize};
use std::fmt;

/// Spatial coordinate an atom constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
        }
    }
}

/// Comparison relation of an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Ge,
    Gt,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Ge => write!(f, ">="),
            Relation::Gt => write!(f, ">"),
            Relation::Eq => write!(f, "="),
        }
    }
}

/// Axis-threshold predicate, e.g. `x >= 0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub axis: Axis,
    pub relation: Relation,
    pub threshold: f64,
}

impl Atom {
    /// Truth of the bare atom at a point. `Eq` is exact equality of reals;
    /// it is intended for grid-snapped thresholds.
    pub fn eval(&self, x: f64, y: f64) -> bool {
        let v = match self.axis {
            Axis::X => x,
            Axis::Y => y,
        };
        match self.relation {
            Relation::Ge => v >= self.threshold,
            Relation::Gt => v > self.threshold,
            Relation::Eq => v == self.threshold,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.axis, self.relation, self.threshold)
    }
}

/// An atom with optional negation. Negation is only admitted at this level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn eval(&self, x: f64, y: f64) -> bool {
        self.atom.eval(x, y) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!({})", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// Bounded temporal operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemporalOp {
    /// `G[t1,t2]`: the body holds at every time in the window.
    Always,
    /// `F[t1,t2]`: the body holds at some time in the window.
    Eventually,
}

impl fmt::Display for TemporalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemporalOp::Always => write!(f, "G"),
            TemporalOp::Eventually => write!(f, "F"),
        }
    }
}

/// One temporally quantified conjunction of literals. Nesting of temporal
/// operators is structurally impossible: the body is a flat literal list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalConjunct {
    pub op: TemporalOp,
    /// `[t1, t2]` in seconds, `0 <= t1 < t2`.
    pub window: (f64, f64),
    /// Nonempty by construction.
    pub body: Vec<Literal>,
}

impl TemporalConjunct {
    /// Conjunction of all body literals at a point.
    pub fn body_holds(&self, x: f64, y: f64) -> bool {
        self.body.iter().all(|lit| lit.eval(x, y))
    }
}

impl fmt::Display for TemporalConjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}](", self.op, self.window.0, self.window.1)?;
        for (i, lit) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{lit}")?;
        }
        write!(f, ")")
    }
}

/// A top-level conjunction of temporal conjuncts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StlFormula {
    /// Nonempty by construction.
    pub conjuncts: Vec<TemporalConjunct>,
}

impl StlFormula {
    /// Latest window end over all conjuncts; the minimum horizon a signal
    /// must cover for monitoring.
    pub fn horizon(&self) -> f64 {
        self.conjuncts
            .iter()
            .map(|c| c.window.1)
            .fold(0.0, f64::max)
    }

    /// Canonical text. `parse(pretty(f))` is structurally equal to `f`
    /// because thresholds print in shortest round-trip form.
    pub fn pretty(&self) -> String {
        self.to_string()
    }

    /// Lint notes for `=` atoms: on a continuous trajectory they denote
    /// measure-zero sets and only make sense for grid-snapped thresholds.
    pub fn eq_atom_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (ci, conjunct) in self.conjuncts.iter().enumerate() {
            for lit in &conjunct.body {
                if lit.atom.relation == Relation::Eq {
                    out.push(format!(
                        "conjunct {ci}: atom '{}' uses '=', which denotes a measure-zero set \
                         on continuous trajectories (intended for grid-snapped thresholds)",
                        lit.atom
                    ));
                }
            }
        }
        out
    }
}

impl fmt::Display for StlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
