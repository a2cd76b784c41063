//! Gate constructors: every logic primitive compiled to gate complexes.
//!
//! A logical wire `w` owns two domains, the toehold `w.t` and the
//! migration domain `w.m`; its signal strand is `[w.t w.m]`. Gates are
//! complexes whose backbone carries the complemented domains, pre-loaded
//! with incumbents so that the intended input sequence — and only it —
//! can run to completion and release the output signal.

use serde::{Deserialize, Serialize};

use super::sim::{simulate, SimParams, SimReport, SolutionState};
use super::{Domain, DomainKind, DsdError, DsdStrand, GateComplex, Incumbent};

/// The short initiation domain of wire `w`.
pub fn wire_toehold(wire: &str) -> Domain {
    Domain {
        id: format!("{wire}.t"),
        kind: DomainKind::Toehold,
        comp: false,
    }
}

/// The long migration domain of wire `w`.
pub fn wire_migration(wire: &str) -> Domain {
    Domain {
        id: format!("{wire}.m"),
        kind: DomainKind::Migration,
        comp: false,
    }
}

/// The signal strand of wire `w`: `[w.t w.m]`.
pub fn signal(wire: &str) -> DsdStrand {
    DsdStrand::new(vec![wire_toehold(wire), wire_migration(wire)])
}

fn ensure_distinct(wires: &[&str]) -> Result<(), DsdError> {
    for (i, wire) in wires.iter().enumerate() {
        if wires[..i].contains(wire) {
            return Err(DsdError::DuplicateWire {
                wire: wire.to_string(),
            });
        }
    }
    Ok(())
}

/// Two-input AND. The backbone chains both input wires and the output
/// toehold; input `a` unblocks the toehold for input `b`, and input `b`
/// carries the output strand off by toehold exchange. Firing takes two
/// displacements and leaves two waste strands.
pub fn and_gate(a: &str, b: &str, out: &str) -> Result<GateComplex, DsdError> {
    ensure_distinct(&[a, b, out])?;
    kand_named(&format!("AND({a},{b}->{out})"), &[a, b], out)
}

/// Single-input relay: consumes `input`'s signal, releases `out`'s.
/// One displacement, one waste strand.
pub fn translator(input: &str, out: &str) -> Result<GateComplex, DsdError> {
    ensure_distinct(&[input, out])?;
    let backbone = DsdStrand::new(vec![
        wire_toehold(input).star(),
        wire_migration(input).star(),
        wire_toehold(out).star(),
    ]);
    let incumbents = vec![
        Incumbent {
            strand: DsdStrand::new(vec![wire_migration(input)]),
            start: 1,
            bound_len: 1,
        },
        Incumbent {
            strand: signal(out),
            start: 2,
            bound_len: 1,
        },
    ];
    let gate = GateComplex {
        name: format!("T({input}->{out})"),
        backbone,
        incumbents,
    };
    debug_assert_eq!(gate.validate(), Ok(()));
    Ok(gate)
}

/// Two-input OR: a translator from each input to the shared output wire.
pub fn or_gates(a: &str, b: &str, out: &str) -> Result<Vec<GateComplex>, DsdError> {
    ensure_distinct(&[a, b, out])?;
    Ok(vec![translator(a, out)?, translator(b, out)?])
}

/// Dual-rail NOT: the low input rail drives the high output rail and vice
/// versa. `input` and `output` are (rail-0, rail-1) wire pairs.
pub fn not_gates(input: (&str, &str), output: (&str, &str)) -> Result<Vec<GateComplex>, DsdError> {
    ensure_distinct(&[input.0, input.1, output.0, output.1])?;
    Ok(vec![
        translator(input.1, output.0)?,
        translator(input.0, output.1)?,
    ])
}

/// k-input AND on a single backbone. Inputs must arrive in any order but
/// can only bind left to right: each input's displacement exposes the next
/// input's toehold, and the last one releases the output. Firing takes k
/// displacements and leaves k waste strands — fewer species and fewer
/// steps than the equivalent cascade of two-input gates.
pub fn kand_gate(inputs: &[&str], out: &str) -> Result<GateComplex, DsdError> {
    if inputs.len() < 2 {
        return Err(DsdError::TooFewInputs);
    }
    let mut wires = inputs.to_vec();
    wires.push(out);
    ensure_distinct(&wires)?;
    let name = format!("AND{}({}->{out})", inputs.len(), inputs.join(","));
    kand_named(&name, inputs, out)
}

fn kand_named(name: &str, inputs: &[&str], out: &str) -> Result<GateComplex, DsdError> {
    let k = inputs.len();
    let mut backbone = Vec::with_capacity(2 * k + 1);
    for wire in inputs {
        backbone.push(wire_toehold(wire).star());
        backbone.push(wire_migration(wire).star());
    }
    backbone.push(wire_toehold(out).star());

    let mut incumbents = Vec::with_capacity(k + 1);
    for i in 0..k - 1 {
        incumbents.push(Incumbent {
            strand: DsdStrand::new(vec![wire_migration(inputs[i]), wire_toehold(inputs[i + 1])]),
            start: 2 * i + 1,
            bound_len: 2,
        });
    }
    incumbents.push(Incumbent {
        strand: DsdStrand::new(vec![wire_migration(inputs[k - 1])]),
        start: 2 * k - 1,
        bound_len: 1,
    });
    incumbents.push(Incumbent {
        strand: signal(out),
        start: 2 * k,
        bound_len: 1,
    });

    let gate = GateComplex {
        name: name.to_string(),
        backbone: DsdStrand::new(backbone),
        incumbents,
    };
    debug_assert_eq!(gate.validate(), Ok(()));
    Ok(gate)
}

/// A counting gate: `theta` annihilator complexes soak up that many
/// copies of the wire's signal, and a release translator converts any
/// surplus into the output. Fires exactly when at least `theta + 1`
/// signal copies are present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSystem {
    pub annihilator: GateComplex,
    pub release: GateComplex,
    pub theta: u64,
}

/// Result of a two-phase threshold evaluation.
#[derive(Debug)]
pub struct ThresholdOutcome {
    pub fired: bool,
    pub absorption: SimReport,
    pub release: SimReport,
}

impl ThresholdSystem {
    pub fn new(wire: &str, out: &str, theta: u64) -> Result<ThresholdSystem, DsdError> {
        if theta == 0 {
            return Err(DsdError::BadThreshold);
        }
        ensure_distinct(&[wire, out])?;
        let backbone = DsdStrand::new(vec![wire_toehold(wire).star(), wire_migration(wire).star()]);
        let annihilator = GateComplex {
            name: format!("ANNIHILATE({wire})"),
            backbone,
            incumbents: vec![Incumbent {
                strand: DsdStrand::new(vec![wire_migration(wire)]),
                start: 1,
                bound_len: 1,
            }],
        };
        debug_assert_eq!(annihilator.validate(), Ok(()));
        let mut release = translator(wire, out)?;
        release.name = format!("RELEASE({wire}->{out})");
        Ok(ThresholdSystem {
            annihilator,
            release,
            theta,
        })
    }

    fn wire_signal(&self) -> DsdStrand {
        DsdStrand::new(vec![
            self.annihilator.backbone.0[0].star(),
            self.annihilator.backbone.0[1].star(),
        ])
    }

    fn out_signal(&self) -> DsdStrand {
        let toehold = self.release.backbone.0[2].star();
        let id = toehold.id.trim_end_matches(".t").to_string();
        DsdStrand::new(vec![toehold, wire_migration(&id)])
    }

    /// Runs the two-phase schedule: absorption to quiescence with only the
    /// annihilators present, then release with the translator added. The
    /// phases keep the translator from racing the annihilators for signal.
    pub fn evaluate(
        &self,
        signal_copies: u64,
        params: &SimParams,
    ) -> Result<ThresholdOutcome, DsdError> {
        let mut state = SolutionState::new();
        state.add_complex(self.annihilator.clone(), self.theta)?;
        if signal_copies > 0 {
            state.add_free(self.wire_signal(), signal_copies);
        }
        let absorption = simulate(state, params)?;

        let mut state = absorption.state.clone();
        state.add_complex(self.release.clone(), 1)?;
        let phase2 = SimParams {
            seed: params.seed.wrapping_add(1),
            ..params.clone()
        };
        let release = simulate(state, &phase2)?;
        let fired = release.state.free_count(&self.out_signal()) > 0;
        Ok(ThresholdOutcome {
            fired,
            absorption,
            release,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_shapes() {
        let and = and_gate("a", "b", "w").unwrap();
        assert_eq!(and.name, "AND(a,b->w)");
        assert_eq!(and.backbone.len(), 5);
        assert_eq!(and.incumbents.len(), 3);

        let t = translator("x", "y").unwrap();
        assert_eq!(t.backbone.len(), 3);
        assert_eq!(t.incumbents.len(), 2);

        let or = or_gates("a", "b", "w").unwrap();
        assert_eq!(or.len(), 2);
        assert_eq!(or[0].name, "T(a->w)");
        assert_eq!(or[1].name, "T(b->w)");

        let not = not_gates(("x.0", "x.1"), ("y.0", "y.1")).unwrap();
        assert_eq!(not[0].name, "T(x.1->y.0)");
        assert_eq!(not[1].name, "T(x.0->y.1)");
    }

    #[test]
    fn kand_generalizes_the_two_input_gate() {
        let and = and_gate("a", "b", "w").unwrap();
        let kand = kand_gate(&["a", "b"], "w").unwrap();
        assert_eq!(kand.backbone, and.backbone);
        assert_eq!(kand.incumbents, and.incumbents);

        let k4 = kand_gate(&["a", "b", "c", "d"], "w").unwrap();
        assert_eq!(k4.backbone.len(), 9);
        assert_eq!(k4.incumbents.len(), 5);
        assert_eq!(k4.name, "AND4(a,b,c,d->w)");
        assert_eq!(k4.exposed_toeholds(), vec![0]);
    }

    #[test]
    fn constructors_reject_repeated_wires() {
        assert_eq!(
            and_gate("a", "a", "w").unwrap_err(),
            DsdError::DuplicateWire {
                wire: "a".to_string()
            }
        );
        assert_eq!(
            translator("a", "a").unwrap_err(),
            DsdError::DuplicateWire {
                wire: "a".to_string()
            }
        );
        assert_eq!(
            kand_gate(&["a", "b"], "b").unwrap_err(),
            DsdError::DuplicateWire {
                wire: "b".to_string()
            }
        );
        assert_eq!(kand_gate(&["a"], "w").unwrap_err(), DsdError::TooFewInputs);
    }

    #[test]
    fn threshold_requires_a_positive_count() {
        assert_eq!(
            ThresholdSystem::new("s", "out", 0).unwrap_err(),
            DsdError::BadThreshold
        );
    }

    #[test]
    fn threshold_fires_strictly_above_theta() {
        let system = ThresholdSystem::new("s", "out", 2).unwrap();
        for copies in 0..=4u64 {
            let outcome = system
                .evaluate(
                    copies,
                    &SimParams {
                        seed: 7,
                        ..SimParams::default()
                    },
                )
                .unwrap();
            assert!(outcome.absorption.quiescent);
            assert!(outcome.release.quiescent);
            assert_eq!(outcome.fired, copies >= 3, "copies = {copies}");
        }
    }
}
