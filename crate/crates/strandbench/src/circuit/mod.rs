//! A small combinational-circuit language and its strand compiler.
//!
//! Source is line oriented:
//!
//! ```text
//! # cumulative parity of two bits
//! inputs a b
//! na = NOT(a)
//! nb = NOT(b)
//! t1 = AND(a, nb)
//! t2 = AND(na, b)
//! x  = OR(t1, t2)
//! outputs x
//! ```
//!
//! One `inputs` line first, gate definitions in dependency order, one
//! `outputs` line last. `AND` takes 2 to 8 arguments, `OR` exactly 2,
//! `NOT` exactly 1; `#` starts a comment. Every wire is defined once
//! before use.
//!
//! [`parse`] builds the AST, [`Circuit::eval`] gives the reference truth
//! table, and [`compile`] lowers the circuit to gate complexes that
//! compute it by strand displacement (see [`CompiledCircuit`]).

mod compile;
mod parse;

pub use compile::{
    compile, CircuitStats, CompileOptions, CompiledCircuit, EvalOutcome, InjectionPlan, RailPlan,
    ReporterPlan,
};
pub use parse::parse;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsd::DsdError;

/// Largest AND fan-in the grammar accepts.
pub const MAX_FANIN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateOp {
    And,
    Or,
    Not,
}

impl GateOp {
    pub fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Or => "OR",
            GateOp::Not => "NOT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub output: String,
    pub op: GateOp,
    pub args: Vec<String>,
}

/// A parsed circuit. Gates are stored in source order, which parsing
/// guarantees is also dependency order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub inputs: Vec<String>,
    pub gates: Vec<Gate>,
    pub outputs: Vec<String>,
}

impl Circuit {
    /// Reference semantics: evaluates every gate over the assignment,
    /// returning one bit per declared output.
    pub fn eval(&self, assignment: &[bool]) -> Result<Vec<bool>, CircuitError> {
        if assignment.len() != self.inputs.len() {
            return Err(CircuitError::BadAssignment {
                expected: self.inputs.len(),
                got: assignment.len(),
            });
        }
        let mut values: BTreeMap<&str, bool> = self
            .inputs
            .iter()
            .map(String::as_str)
            .zip(assignment.iter().copied())
            .collect();
        for gate in &self.gates {
            let bits: Vec<bool> = gate.args.iter().map(|a| values[a.as_str()]).collect();
            let out = match gate.op {
                GateOp::And => bits.iter().all(|&b| b),
                GateOp::Or => bits.iter().any(|&b| b),
                GateOp::Not => !bits[0],
            };
            values.insert(&gate.output, out);
        }
        Ok(self.outputs.iter().map(|o| values[o.as_str()]).collect())
    }

    /// Longest input-to-output path length, counting gates.
    pub fn depth(&self) -> usize {
        let mut depth: BTreeMap<&str, usize> =
            self.inputs.iter().map(|w| (w.as_str(), 0)).collect();
        for gate in &self.gates {
            let d = 1 + gate
                .args
                .iter()
                .map(|a| depth[a.as_str()])
                .max()
                .unwrap_or(0);
            depth.insert(&gate.output, d);
        }
        self.outputs
            .iter()
            .map(|o| depth[o.as_str()])
            .max()
            .unwrap_or(0)
    }

    pub fn has_not(&self) -> bool {
        self.gates.iter().any(|g| g.op == GateOp::Not)
    }
}

impl fmt::Display for Circuit {
    /// Canonical source text; `parse` inverts it exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "inputs")?;
        for input in &self.inputs {
            write!(f, " {input}")?;
        }
        writeln!(f)?;
        for gate in &self.gates {
            writeln!(
                f,
                "{} = {}({})",
                gate.output,
                gate.op.name(),
                gate.args.join(", ")
            )?;
        }
        write!(f, "outputs")?;
        for output in &self.outputs {
            write!(f, " {output}")?;
        }
        writeln!(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown operation {0:?}; expected AND, OR, or NOT")]
    UnknownOp(String),
    #[error("{0:?} is a reserved word")]
    Reserved(String),
    #[error("wire {0:?} is already defined")]
    Redefined(String),
    #[error("wire {0:?} is not defined")]
    Undefined(String),
    #[error("{op} takes {expected} arguments, got {got}")]
    Arity {
        op: &'static str,
        expected: &'static str,
        got: usize,
    },
    #[error("gate arguments must be distinct, but {0:?} repeats")]
    RepeatedArg(String),
    #[error("output {0:?} is listed twice")]
    DuplicateOutput(String),
    #[error("duplicate {0} line")]
    DuplicateSection(&'static str),
    #[error("the inputs line must come before gate definitions")]
    InputsNotFirst,
    #[error("nothing may follow the outputs line")]
    AfterOutputs,
    #[error("missing inputs line")]
    MissingInputs,
    #[error("missing outputs line")]
    MissingOutputs,
}

/// A source error located at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Dsd(#[from] DsdError),
    #[error("expected {expected} input values, got {got}")]
    BadAssignment { expected: usize, got: usize },
}
