//! Lowering circuits to strand-displacement gate complexes.
//!
//! The pipeline: wide ANDs are either kept as single multi-input gates or
//! cascaded into two-input gates; if the circuit uses NOT — or on request
//! — every logical wire is split into a low and a high rail so inversion
//! becomes a rail swap; then a backward demand pass sizes everything.
//!
//! Demand is what makes fan-out work with single-use gates: a wire
//! consumed by n gate instances needs n signal copies, so its producer is
//! instantiated n times, and that multiplies the producer's own input
//! demand in turn. Inputs end up with the copy count to inject, gates
//! with the instance count to mix in, and unused gates drop out at
//! multiplicity zero.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, Gate, GateOp};
use crate::dsd::{
    and_gate, kand_gate, signal, simulate, translator, GateComplex, SimParams, SimReport,
    SolutionState,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Compile wide ANDs as single multi-input complexes instead of
    /// cascades of two-input gates.
    pub multi_input: bool,
    /// Split every wire into value rails. Forced on when the circuit
    /// contains NOT.
    pub dual_rail: bool,
}

/// One signal species to inject and how many copies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RailPlan {
    pub wire: String,
    pub copies: u64,
}

/// What to inject for one logical input. Single-rail circuits encode
/// false as absence, so `when_false` is None there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionPlan {
    pub when_true: RailPlan,
    pub when_false: Option<RailPlan>,
}

/// Where to read one logical output: presence of `high`'s signal means
/// true. Dual-rail circuits also carry the low rail, whose presence
/// must complement the high rail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReporterPlan {
    pub high: String,
    pub low: Option<String>,
}

/// A gate complex and how many copies of it to mix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexBatch {
    pub complex: GateComplex,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    /// Logical gates in the source.
    pub gates: usize,
    /// Longest input-to-output path in the source.
    pub depth: usize,
    /// Distinct gate complex species.
    pub complex_species: usize,
    /// Total gate complex instances.
    pub complex_count: u64,
    /// Distinct strand species across complexes and injections.
    pub strand_species: usize,
    /// Distinct domain identifiers across those strands.
    pub domain_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledCircuit {
    pub source: Circuit,
    pub dual_rail: bool,
    pub multi_input: bool,
    pub complexes: Vec<ComplexBatch>,
    /// One plan per source input, in order.
    pub injections: Vec<InjectionPlan>,
    /// One plan per source output, in order.
    pub reporters: Vec<ReporterPlan>,
    pub warnings: Vec<String>,
    pub stats: CircuitStats,
    /// Upper bound on displacement events a faithful run can take.
    pub step_bound: u64,
}

/// Result of simulating a compiled circuit on one assignment.
#[derive(Debug)]
pub struct EvalOutcome {
    pub outputs: Vec<bool>,
    /// Dual-rail sanity: every output presented exactly one rail.
    pub consistent: bool,
    pub report: SimReport,
}

/// Physical gate shape after lowering. OR never appears: it is emitted
/// as one relay per operand sharing the output wire.
enum Primitive {
    And { ins: Vec<String>, out: String },
    Relay { input: String, out: String },
}

impl Primitive {
    fn out(&self) -> &str {
        match self {
            Primitive::And { out, .. } | Primitive::Relay { out, .. } => out,
        }
    }

    fn ins(&self) -> Vec<&str> {
        match self {
            Primitive::And { ins, .. } => ins.iter().map(String::as_str).collect(),
            Primitive::Relay { input, .. } => vec![input.as_str()],
        }
    }

    /// Displacement events one instance consumes when it fires fully.
    fn steps(&self) -> u64 {
        match self {
            Primitive::And { ins, .. } => ins.len() as u64,
            Primitive::Relay { .. } => 1,
        }
    }
}

fn rail0(wire: &str) -> String {
    format!("{wire}.0")
}

fn rail1(wire: &str) -> String {
    format!("{wire}.1")
}

fn valid_wire_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Replaces wide ANDs with chains of two-input ANDs through synthetic
/// wires (`out~1`, `out~2`, ... — names no source wire can collide with).
fn cascade_lowering(gates: &[Gate]) -> Vec<Gate> {
    let mut lowered = Vec::new();
    for gate in gates {
        if gate.op == GateOp::And && gate.args.len() > 2 {
            let k = gate.args.len();
            let mut acc = gate.args[0].clone();
            for i in 1..k {
                let out = if i == k - 1 {
                    gate.output.clone()
                } else {
                    format!("{}~{}", gate.output, i)
                };
                lowered.push(Gate {
                    output: out.clone(),
                    op: GateOp::And,
                    args: vec![acc, gate.args[i].clone()],
                });
                acc = out;
            }
        } else {
            lowered.push(gate.clone());
        }
    }
    lowered
}

fn physical_primitives(gates: &[Gate], dual: bool) -> Vec<Primitive> {
    let mut prims = Vec::new();
    for gate in gates {
        if !dual {
            match gate.op {
                GateOp::And => prims.push(Primitive::And {
                    ins: gate.args.clone(),
                    out: gate.output.clone(),
                }),
                GateOp::Or => {
                    for arg in &gate.args {
                        prims.push(Primitive::Relay {
                            input: arg.clone(),
                            out: gate.output.clone(),
                        });
                    }
                }
                GateOp::Not => {
                    unreachable!("dual-rail is enabled whenever NOT is present")
                }
            }
            continue;
        }
        match gate.op {
            GateOp::And => {
                prims.push(Primitive::And {
                    ins: gate.args.iter().map(|a| rail1(a)).collect(),
                    out: rail1(&gate.output),
                });
                for arg in &gate.args {
                    prims.push(Primitive::Relay {
                        input: rail0(arg),
                        out: rail0(&gate.output),
                    });
                }
            }
            GateOp::Or => {
                for arg in &gate.args {
                    prims.push(Primitive::Relay {
                        input: rail1(arg),
                        out: rail1(&gate.output),
                    });
                }
                prims.push(Primitive::And {
                    ins: gate.args.iter().map(|a| rail0(a)).collect(),
                    out: rail0(&gate.output),
                });
            }
            GateOp::Not => {
                let arg = &gate.args[0];
                prims.push(Primitive::Relay {
                    input: rail0(arg),
                    out: rail1(&gate.output),
                });
                prims.push(Primitive::Relay {
                    input: rail1(arg),
                    out: rail0(&gate.output),
                });
            }
        }
    }
    prims
}

/// Compiles a circuit to the complexes, injection plans, and reporters
/// that realize it in solution.
pub fn compile(
    circuit: &Circuit,
    options: &CompileOptions,
) -> Result<CompiledCircuit, CircuitError> {
    for name in circuit
        .inputs
        .iter()
        .chain(circuit.gates.iter().map(|g| &g.output))
    {
        if !valid_wire_name(name) {
            return Err(CircuitError::Dsd(crate::dsd::DsdError::DuplicateWire {
                wire: name.clone(),
            }));
        }
    }

    let mut warnings = Vec::new();
    let dual = options.dual_rail || circuit.has_not();
    if dual && !options.dual_rail {
        warnings.push("NOT gates need dual-rail signals; dual-rail mode enabled".to_string());
    }

    let logical = if options.multi_input {
        circuit.gates.clone()
    } else {
        cascade_lowering(&circuit.gates)
    };
    let prims = physical_primitives(&logical, dual);

    // backward demand pass; primitives are in dependency order
    let mut demand: BTreeMap<String, u64> = BTreeMap::new();
    for out in &circuit.outputs {
        if dual {
            *demand.entry(rail0(out)).or_insert(0) += 1;
            *demand.entry(rail1(out)).or_insert(0) += 1;
        } else {
            *demand.entry(out.clone()).or_insert(0) += 1;
        }
    }
    let mut multiplicity = vec![0u64; prims.len()];
    for (i, prim) in prims.iter().enumerate().rev() {
        let m = demand.get(prim.out()).copied().unwrap_or(0);
        multiplicity[i] = m;
        if m > 0 {
            for input in prim.ins() {
                *demand.entry(input.to_string()).or_insert(0) += m;
            }
        }
    }

    let mut complexes: BTreeMap<GateComplex, u64> = BTreeMap::new();
    let mut step_bound = 0u64;
    for (prim, &m) in prims.iter().zip(&multiplicity) {
        if m == 0 {
            continue;
        }
        step_bound += m * prim.steps();
        let complex = match prim {
            Primitive::And { ins, out } if ins.len() == 2 => and_gate(&ins[0], &ins[1], out)?,
            Primitive::And { ins, out } => {
                let refs: Vec<&str> = ins.iter().map(String::as_str).collect();
                kand_gate(&refs, out)?
            }
            Primitive::Relay { input, out } => translator(input, out)?,
        };
        *complexes.entry(complex).or_insert(0) += m;
    }

    let injections: Vec<InjectionPlan> = circuit
        .inputs
        .iter()
        .map(|w| {
            let copies = |wire: &str| demand.get(wire).copied().unwrap_or(0);
            if dual {
                InjectionPlan {
                    when_true: RailPlan {
                        wire: rail1(w),
                        copies: copies(&rail1(w)),
                    },
                    when_false: Some(RailPlan {
                        wire: rail0(w),
                        copies: copies(&rail0(w)),
                    }),
                }
            } else {
                InjectionPlan {
                    when_true: RailPlan {
                        wire: w.clone(),
                        copies: copies(w),
                    },
                    when_false: None,
                }
            }
        })
        .collect();

    let reporters: Vec<ReporterPlan> = circuit
        .outputs
        .iter()
        .map(|o| {
            if dual {
                ReporterPlan {
                    high: rail1(o),
                    low: Some(rail0(o)),
                }
            } else {
                ReporterPlan {
                    high: o.clone(),
                    low: None,
                }
            }
        })
        .collect();

    let mut strands: BTreeSet<crate::dsd::DsdStrand> = BTreeSet::new();
    for complex in complexes.keys() {
        strands.insert(complex.backbone.clone());
        for inc in &complex.incumbents {
            strands.insert(inc.strand.clone());
        }
    }
    for plan in &injections {
        if plan.when_true.copies > 0 {
            strands.insert(signal(&plan.when_true.wire));
        }
        if let Some(low) = &plan.when_false {
            if low.copies > 0 {
                strands.insert(signal(&low.wire));
            }
        }
    }
    let domain_count = strands
        .iter()
        .flat_map(|s| s.domains().iter().map(|d| d.id.clone()))
        .collect::<BTreeSet<String>>()
        .len();

    let stats = CircuitStats {
        gates: circuit.gates.len(),
        depth: circuit.depth(),
        complex_species: complexes.len(),
        complex_count: complexes.values().sum(),
        strand_species: strands.len(),
        domain_count,
    };

    Ok(CompiledCircuit {
        source: circuit.clone(),
        dual_rail: dual,
        multi_input: options.multi_input,
        complexes: complexes
            .into_iter()
            .map(|(complex, count)| ComplexBatch { complex, count })
            .collect(),
        injections,
        reporters,
        warnings,
        stats,
        step_bound,
    })
}

impl CompiledCircuit {
    /// Mixes the complexes, injects the assignment's signals, simulates
    /// to quiescence (or the budget), and reads the reporters.
    pub fn evaluate(
        &self,
        assignment: &[bool],
        params: &SimParams,
    ) -> Result<EvalOutcome, CircuitError> {
        if assignment.len() != self.source.inputs.len() {
            return Err(CircuitError::BadAssignment {
                expected: self.source.inputs.len(),
                got: assignment.len(),
            });
        }
        let mut state = SolutionState::new();
        for batch in &self.complexes {
            state.add_complex(batch.complex.clone(), batch.count)?;
        }
        for (plan, &bit) in self.injections.iter().zip(assignment) {
            let rail = if bit {
                Some(&plan.when_true)
            } else {
                plan.when_false.as_ref()
            };
            if let Some(rail) = rail {
                state.add_free(signal(&rail.wire), rail.copies);
            }
        }
        let report = simulate(state, params)?;
        let mut outputs = Vec::with_capacity(self.reporters.len());
        let mut consistent = true;
        for reporter in &self.reporters {
            let high = report.state.free_count(&signal(&reporter.high)) > 0;
            if let Some(low) = &reporter.low {
                let low_present = report.state.free_count(&signal(low)) > 0;
                consistent &= high != low_present;
            }
            outputs.push(high);
        }
        Ok(EvalOutcome {
            outputs,
            consistent,
            report,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn all_assignments(n: usize) -> Vec<Vec<bool>> {
        (0..1usize << n)
            .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
            .collect()
    }

    /// Compiled behavior must equal the reference evaluator on every
    /// assignment, quiesce, and respect the step bound.
    fn assert_faithful(src: &str, options: &CompileOptions) {
        let circuit = parse(src).unwrap();
        let compiled = compile(&circuit, options).unwrap();
        for assignment in all_assignments(circuit.inputs.len()) {
            for seed in 0..3u64 {
                let params = SimParams {
                    seed,
                    ..SimParams::default()
                };
                let outcome = compiled.evaluate(&assignment, &params).unwrap();
                assert!(outcome.report.quiescent, "must quiesce: {src}");
                assert!(outcome.consistent, "rails must be exclusive: {src}");
                assert_eq!(
                    outcome.outputs,
                    circuit.eval(&assignment).unwrap(),
                    "{src} on {assignment:?} (seed {seed}, {options:?})"
                );
                assert!(
                    (outcome.report.trace.len() as u64) <= compiled.step_bound,
                    "step bound violated: {src}"
                );
            }
        }
    }

    #[test]
    fn single_rail_and_or_match_the_reference() {
        let src = "inputs a b c\nw = AND(a, b)\nx = OR(w, c)\noutputs x w\n";
        assert_faithful(src, &CompileOptions::default());
        assert_faithful(
            src,
            &CompileOptions {
                dual_rail: true,
                ..Default::default()
            },
        );
    }

    #[test]
    fn not_forces_dual_rail_with_a_warning() {
        let circuit = parse("inputs a\nw = NOT(a)\noutputs w\n").unwrap();
        let compiled = compile(&circuit, &CompileOptions::default()).unwrap();
        assert!(compiled.dual_rail);
        assert_eq!(compiled.warnings.len(), 1);
        assert!(compiled.warnings[0].contains("dual-rail"));

        let explicit = compile(
            &circuit,
            &CompileOptions {
                dual_rail: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(explicit.warnings.is_empty());
    }

    #[test]
    fn dual_rail_xor_matches_the_reference() {
        let src = "inputs a b\n\
                   na = NOT(a)\n\
                   nb = NOT(b)\n\
                   t1 = AND(a, nb)\n\
                   t2 = AND(na, b)\n\
                   x = OR(t1, t2)\n\
                   outputs x\n";
        assert_faithful(src, &CompileOptions::default());
    }

    #[test]
    fn fan_out_multiplies_gate_instances_upstream() {
        let src = "inputs a b c\n\
                   w = AND(a, b)\n\
                   x = AND(w, c)\n\
                   y = AND(w, c)\n\
                   outputs x y\n";
        let circuit = parse(src).unwrap();
        let compiled = compile(&circuit, &CompileOptions::default()).unwrap();

        let counts: BTreeMap<&str, u64> = compiled
            .complexes
            .iter()
            .map(|b| (b.complex.name.as_str(), b.count))
            .collect();
        assert_eq!(counts["AND(a,b->w)"], 2, "w feeds two consumers");
        assert_eq!(counts["AND(w,c->x)"], 1);
        assert_eq!(counts["AND(w,c->y)"], 1);
        // both x's and y's gates draw on c, so two copies are injected
        assert_eq!(compiled.injections[2].when_true.copies, 2);
        assert_eq!(compiled.injections[0].when_true.copies, 2);

        assert_faithful(src, &CompileOptions::default());
    }

    #[test]
    fn unused_gates_are_not_instantiated() {
        let src = "inputs a b\nw = AND(a, b)\ndead = OR(a, b)\noutputs w\n";
        let circuit = parse(src).unwrap();
        let compiled = compile(&circuit, &CompileOptions::default()).unwrap();
        assert_eq!(compiled.complexes.len(), 1);
        assert_eq!(compiled.complexes[0].complex.name, "AND(a,b->w)");
        assert_faithful(src, &CompileOptions::default());
    }

    #[test]
    fn wide_and_compiles_both_ways_and_multi_input_is_leaner() {
        let src = "inputs a b c d\nw = AND(a, b, c, d)\noutputs w\n";
        for multi_input in [false, true] {
            for dual_rail in [false, true] {
                assert_faithful(
                    src,
                    &CompileOptions {
                        multi_input,
                        dual_rail,
                    },
                );
            }
        }
        let circuit = parse(src).unwrap();
        let cascade = compile(&circuit, &CompileOptions::default()).unwrap();
        let multi = compile(
            &circuit,
            &CompileOptions {
                multi_input: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(multi.stats.complex_species < cascade.stats.complex_species);
        assert!(multi.stats.strand_species < cascade.stats.strand_species);
        assert!(multi.stats.domain_count < cascade.stats.domain_count);
        assert!(multi.step_bound < cascade.step_bound);
    }

    #[test]
    fn passthrough_outputs_report_the_injected_signal() {
        let src = "inputs a b\nw = AND(a, b)\noutputs w a\n";
        assert_faithful(src, &CompileOptions::default());
        assert_faithful(
            src,
            &CompileOptions {
                dual_rail: true,
                ..Default::default()
            },
        );
    }

    #[test]
    fn stats_describe_the_mix() {
        let circuit = parse("inputs a b\nw = AND(a, b)\noutputs w\n").unwrap();
        let compiled = compile(&circuit, &CompileOptions::default()).unwrap();
        assert_eq!(compiled.stats.gates, 1);
        assert_eq!(compiled.stats.depth, 1);
        assert_eq!(compiled.stats.complex_species, 1);
        assert_eq!(compiled.stats.complex_count, 1);
        // backbone, two staples, output strand, two input signals
        assert_eq!(compiled.stats.strand_species, 6);
        // a, b, w toehold+migration pairs
        assert_eq!(compiled.stats.domain_count, 6);
        assert_eq!(compiled.step_bound, 2);
    }

    #[test]
    fn compiled_circuit_round_trips_through_json() {
        let circuit = parse("inputs a b\nna = NOT(a)\nw = AND(na, b)\noutputs w\n").unwrap();
        let compiled = compile(&circuit, &CompileOptions::default()).unwrap();
        let json = serde_json::to_string(&compiled).unwrap();
        let back: CompiledCircuit = serde_json::from_str(&json).unwrap();
        assert_eq!(back, compiled);
    }

    #[test]
    fn evaluate_checks_assignment_arity() {
        let circuit = parse("inputs a b\nw = AND(a, b)\noutputs w\n").unwrap();
        let compiled = compile(&circuit, &CompileOptions::default()).unwrap();
        assert!(matches!(
            compiled.evaluate(&[true], &SimParams::default()),
            Err(CircuitError::BadAssignment {
                expected: 2,
                got: 1
            })
        ));
    }
}
