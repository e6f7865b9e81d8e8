//! Restricted Signal Temporal Logic: abstract syntax, parser, canonical
//! printer, and a sample-based satisfaction monitor.
//!
//! The admitted fragment is a top-level conjunction of bounded temporal
//! conjuncts, each a single `G[t1,t2]` or `F[t1,t2]` over a conjunction of
//! (optionally negated) axis-threshold atoms:
//!
//! ```text
//! formula := tconj ('&' tconj)*
//! tconj   := ('G'|'F') '[' num ',' num ']' '(' lit ('&' lit)* ')'
//! lit     := ['!'] '(' atom ')' | ['!'] atom
//! atom    := ('x'|'y') ('>='|'>'|'=') num
//! ```
//!
//! Disjunction, implication, nested temporal operators, and negation of
//! anything but an atom are rejected with [`ParseError::Fragment`] naming
//! the violated rule.

mod ast;
mod monitor;
mod parser;

pub use ast::{Atom, Axis, Literal, Relation, StlFormula, TemporalConjunct, TemporalOp};
pub use monitor::{monitor, ConjunctVerdict, MonitorError, MonitorVerdict, Signal, SignalError};
pub use parser::{parse, FragmentRule, ParseError};
