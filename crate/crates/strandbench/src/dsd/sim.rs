//! Stochastic simulation of a well-mixed strand displacement solution.
//!
//! The state is three multisets: free signal strands, gate complexes, and
//! waste. Each step enumerates every eligible reaction, weights it by the
//! product of its reactants' counts times its rate class (exact invasions
//! at unit rate, leaks at the configured leak rate), picks one at seeded
//! random, and applies it. The run ends at quiescence — no eligible
//! reaction — or when the event budget is spent.
//!
//! Every step re-checks that the strand census — every strand in
//! solution, bound into a complex, or in waste — is exactly the census
//! the run started with. The check is a hard assertion: a violation is a
//! bug in the reaction rules, not a recoverable condition.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DsdError, DsdStrand, GateComplex, InvasionSite};

fn bump<K: Ord>(map: &mut BTreeMap<K, u64>, key: K, count: u64) {
    if count > 0 {
        *map.entry(key).or_insert(0) += count;
    }
}

fn drop_one<K: Ord + Clone>(map: &mut BTreeMap<K, u64>, key: &K) {
    let n = map.get_mut(key).expect("reactant species present");
    *n -= 1;
    if *n == 0 {
        map.remove(key);
    }
}

/// Multisets of everything in the tube. Species counts are kept in
/// ordered maps so enumeration — and therefore simulation under a fixed
/// seed — is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct SolutionState {
    free: BTreeMap<DsdStrand, u64>,
    complexes: BTreeMap<GateComplex, u64>,
    waste: BTreeMap<DsdStrand, u64>,
}

impl SolutionState {
    pub fn new() -> SolutionState {
        SolutionState::default()
    }

    pub fn add_free(&mut self, strand: DsdStrand, count: u64) {
        bump(&mut self.free, strand, count);
    }

    /// Adds `count` copies of a complex after checking its structure.
    pub fn add_complex(&mut self, complex: GateComplex, count: u64) -> Result<(), DsdError> {
        complex.validate()?;
        bump(&mut self.complexes, complex, count);
        Ok(())
    }

    pub fn add_waste(&mut self, strand: DsdStrand, count: u64) {
        bump(&mut self.waste, strand, count);
    }

    pub fn free_count(&self, strand: &DsdStrand) -> u64 {
        self.free.get(strand).copied().unwrap_or(0)
    }

    pub fn waste_count(&self, strand: &DsdStrand) -> u64 {
        self.waste.get(strand).copied().unwrap_or(0)
    }

    pub fn free_species(&self) -> impl Iterator<Item = (&DsdStrand, u64)> {
        self.free.iter().map(|(s, &n)| (s, n))
    }

    pub fn complex_species(&self) -> impl Iterator<Item = (&GateComplex, u64)> {
        self.complexes.iter().map(|(c, &n)| (c, n))
    }

    pub fn waste_species(&self) -> impl Iterator<Item = (&DsdStrand, u64)> {
        self.waste.iter().map(|(s, &n)| (s, n))
    }

    /// Exposed toehold domains across all complexes, counted by domain id
    /// and weighted by complex count: the positions a leak could target
    /// given a matching waste strand.
    pub fn exposed_toehold_census(&self) -> BTreeMap<String, u64> {
        let mut census = BTreeMap::new();
        for (complex, &n) in &self.complexes {
            for p in complex.exposed_toeholds() {
                bump(&mut census, complex.backbone.domains()[p].id.clone(), n);
            }
        }
        census
    }

    /// Every strand in the tube by count: free and waste strands as
    /// themselves, complexes as their backbone plus each incumbent.
    pub fn census(&self) -> BTreeMap<DsdStrand, u64> {
        let mut census = BTreeMap::new();
        for (strand, &n) in &self.free {
            bump(&mut census, strand.clone(), n);
        }
        for (strand, &n) in &self.waste {
            bump(&mut census, strand.clone(), n);
        }
        for (complex, &n) in &self.complexes {
            bump(&mut census, complex.backbone.clone(), n);
            for inc in &complex.incumbents {
                bump(&mut census, inc.strand.clone(), n);
            }
        }
        census
    }
}

#[derive(Serialize, Deserialize)]
struct StrandCount {
    strand: DsdStrand,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct ComplexCount {
    complex: GateComplex,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    free: Vec<StrandCount>,
    complexes: Vec<ComplexCount>,
    waste: Vec<StrandCount>,
}

impl From<SolutionState> for StateRepr {
    fn from(state: SolutionState) -> StateRepr {
        StateRepr {
            free: state
                .free
                .into_iter()
                .map(|(strand, count)| StrandCount { strand, count })
                .collect(),
            complexes: state
                .complexes
                .into_iter()
                .map(|(complex, count)| ComplexCount { complex, count })
                .collect(),
            waste: state
                .waste
                .into_iter()
                .map(|(strand, count)| StrandCount { strand, count })
                .collect(),
        }
    }
}

impl TryFrom<StateRepr> for SolutionState {
    type Error = String;

    fn try_from(repr: StateRepr) -> Result<SolutionState, String> {
        let mut state = SolutionState::new();
        for entry in repr.free {
            if entry.count == 0 {
                return Err("free strand with zero count".to_string());
            }
            state.add_free(entry.strand, entry.count);
        }
        for entry in repr.complexes {
            if entry.count == 0 {
                return Err("complex with zero count".to_string());
            }
            state
                .add_complex(entry.complex, entry.count)
                .map_err(|e| e.to_string())?;
        }
        for entry in repr.waste {
            if entry.count == 0 {
                return Err("waste strand with zero count".to_string());
            }
            state.add_waste(entry.strand, entry.count);
        }
        Ok(state)
    }
}

/// Which rate a reaction runs at: exact invasions at 1, leaks at the
/// configured leak rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateClass {
    Normal,
    Leak,
}

/// One applied reaction, suitable for a JSON-lines trace. Species are
/// written as `free:`, `waste:`, or `complex:` prefixed display strings;
/// a leak's waste strand appears in both lists because it survives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionEvent {
    pub step: u64,
    pub rate_class: RateClass,
    pub reactants: Vec<String>,
    pub products: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub seed: u64,
    pub max_events: u64,
    pub leak_rate: f64,
}

impl Default for SimParams {
    fn default() -> SimParams {
        SimParams {
            seed: 0,
            max_events: 10_000,
            leak_rate: 0.0,
        }
    }
}

/// Final state plus the full event trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub state: SolutionState,
    pub trace: Vec<ReactionEvent>,
    /// True when the run stopped because nothing could react, rather
    /// than by exhausting the event budget.
    pub quiescent: bool,
}

struct Candidate {
    complex: GateComplex,
    invader: DsdStrand,
    site: InvasionSite,
    class: RateClass,
    weight: f64,
}

fn enumerate_candidates(state: &SolutionState, leak_rate: f64) -> Vec<Candidate> {
    let mut candidates = Vec::new();
    for (complex, complex_count) in state.complex_species() {
        for (strand, strand_count) in state.free_species() {
            for site in complex.invasion_sites(strand) {
                candidates.push(Candidate {
                    complex: complex.clone(),
                    invader: strand.clone(),
                    site,
                    class: RateClass::Normal,
                    weight: complex_count as f64 * strand_count as f64,
                });
            }
        }
        if leak_rate > 0.0 {
            for (strand, strand_count) in state.waste_species() {
                for site in complex.leak_sites(strand) {
                    candidates.push(Candidate {
                        complex: complex.clone(),
                        invader: strand.clone(),
                        site,
                        class: RateClass::Leak,
                        weight: complex_count as f64 * strand_count as f64 * leak_rate,
                    });
                }
            }
        }
    }
    candidates
}

/// Runs the solution forward. Identical seeds reproduce the trace
/// byte for byte.
pub fn simulate(initial: SolutionState, params: &SimParams) -> Result<SimReport, DsdError> {
    if !params.leak_rate.is_finite() || params.leak_rate < 0.0 {
        return Err(DsdError::BadLeakRate);
    }
    for (complex, _) in initial.complex_species() {
        complex.validate()?;
    }
    let baseline = initial.census();
    let mut state = initial;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut trace = Vec::new();
    let mut quiescent = false;

    for step in 0..params.max_events {
        let candidates = enumerate_candidates(&state, params.leak_rate);
        let total: f64 = candidates.iter().map(|c| c.weight).sum();
        if candidates.is_empty() || total <= 0.0 {
            quiescent = true;
            break;
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = candidates.len() - 1;
        for (i, candidate) in candidates.iter().enumerate() {
            pick -= candidate.weight;
            if pick < 0.0 {
                chosen = i;
                break;
            }
        }
        let event = apply(&mut state, &candidates[chosen], step);
        trace.push(event);

        // strand census conservation is a structural invariant of every
        // reaction rule; check it unconditionally after each event
        assert_eq!(
            state.census(),
            baseline,
            "strand census changed at step {step}"
        );
    }

    Ok(SimReport {
        state,
        trace,
        quiescent,
    })
}

fn apply(state: &mut SolutionState, candidate: &Candidate, step: u64) -> ReactionEvent {
    let complex = &candidate.complex;
    let invader = &candidate.invader;
    let mut reactants = vec![format!("complex:{complex}")];
    drop_one(&mut state.complexes, complex);

    let (next, released) = match candidate.class {
        RateClass::Normal => {
            reactants.push(format!("free:{invader}"));
            drop_one(&mut state.free, invader);
            complex.apply_invasion(invader, &candidate.site)
        }
        RateClass::Leak => {
            // the leaking waste strand catalyzes: consumed here, restored
            // among the products
            reactants.push(format!("waste:{invader}"));
            complex.apply_leak(&candidate.site)
        }
    };

    let mut products = vec![format!("complex:{next}")];
    if candidate.class == RateClass::Leak {
        products.push(format!("waste:{invader}"));
    }
    bump(&mut state.complexes, next, 1);
    for strand in released {
        if strand.leads_with_toehold() {
            products.push(format!("free:{strand}"));
            state.add_free(strand, 1);
        } else {
            products.push(format!("waste:{strand}"));
            state.add_waste(strand, 1);
        }
    }

    ReactionEvent {
        step,
        rate_class: candidate.class,
        reactants,
        products,
    }
}

#[cfg(test)]
mod tests {
    use super::super::gates::{
        and_gate, kand_gate, or_gates, signal, wire_migration, wire_toehold,
    };
    use super::super::DsdStrand;
    use super::*;
    use proptest::prelude::*;

    fn and_state(a: u64, b: u64) -> SolutionState {
        let mut state = SolutionState::new();
        state
            .add_complex(and_gate("a", "b", "w").unwrap(), 1)
            .unwrap();
        state.add_free(signal("a"), a);
        state.add_free(signal("b"), b);
        state
    }

    #[test]
    fn and_gate_truth_table() {
        for seed in 0..5u64 {
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let params = SimParams {
                    seed,
                    ..SimParams::default()
                };
                let report = simulate(and_state(a, b), &params).unwrap();
                assert!(report.quiescent);
                let out = report.state.free_count(&signal("w"));
                assert_eq!(out, u64::from(a == 1 && b == 1), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn and_firing_leaves_two_waste_strands() {
        let report = simulate(and_state(1, 1), &SimParams::default()).unwrap();
        assert_eq!(report.trace.len(), 2);
        let waste: u64 = report.state.waste_species().map(|(_, n)| n).sum();
        assert_eq!(waste, 2);
        assert!(report
            .trace
            .iter()
            .all(|e| e.rate_class == RateClass::Normal));
    }

    #[test]
    fn or_gate_fires_on_either_and_doubles_on_both() {
        for (a, b, want) in [(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 2)] {
            let mut state = SolutionState::new();
            for gate in or_gates("a", "b", "w").unwrap() {
                state.add_complex(gate, 1).unwrap();
            }
            state.add_free(signal("a"), a);
            state.add_free(signal("b"), b);
            let report = simulate(state, &SimParams::default()).unwrap();
            assert!(report.quiescent);
            assert_eq!(report.state.free_count(&signal("w")), want);
        }
    }

    #[test]
    fn three_input_and_needs_every_input() {
        for missing in 0..4usize {
            let mut state = SolutionState::new();
            state
                .add_complex(kand_gate(&["a", "b", "c"], "w").unwrap(), 1)
                .unwrap();
            for (i, wire) in ["a", "b", "c"].iter().enumerate() {
                if i != missing {
                    state.add_free(signal(wire), 1);
                }
            }
            let report = simulate(state, &SimParams::default()).unwrap();
            assert!(report.quiescent);
            let fired = report.state.free_count(&signal("w")) > 0;
            assert_eq!(fired, missing == 3);
            if missing == 3 {
                assert_eq!(report.trace.len(), 3);
                let waste: u64 = report.state.waste_species().map(|(_, n)| n).sum();
                assert_eq!(waste, 3);
            }
        }
    }

    #[test]
    fn census_is_conserved_end_to_end() {
        let state = and_state(1, 1);
        let before = state.census();
        let report = simulate(state, &SimParams::default()).unwrap();
        assert_eq!(report.state.census(), before);
    }

    #[test]
    fn exposed_toehold_census_tracks_reaction_progress() {
        let mut state = SolutionState::new();
        state
            .add_complex(and_gate("a", "b", "w").unwrap(), 2)
            .unwrap();
        assert_eq!(
            state.exposed_toehold_census(),
            [("a.t".to_string(), 2)].into_iter().collect()
        );
        state.add_free(signal("a"), 1);
        let report = simulate(state, &SimParams::default()).unwrap();
        // one gate half-fired (b toehold open), one still fresh
        assert_eq!(
            report.state.exposed_toehold_census(),
            [("a.t".to_string(), 1), ("b.t".to_string(), 1)]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn event_budget_censors_the_run() {
        let params = SimParams {
            max_events: 1,
            ..SimParams::default()
        };
        let report = simulate(and_state(1, 1), &params).unwrap();
        assert_eq!(report.trace.len(), 1);
        assert!(!report.quiescent);
    }

    #[test]
    fn empty_state_is_quiescent() {
        let report = simulate(SolutionState::new(), &SimParams::default()).unwrap();
        assert!(report.quiescent);
        assert!(report.trace.is_empty());
    }

    #[test]
    fn same_seed_reproduces_the_trace() {
        let params = SimParams {
            seed: 42,
            ..SimParams::default()
        };
        let a = simulate(and_state(1, 1), &params).unwrap();
        let b = simulate(and_state(1, 1), &params).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn negative_or_bad_leak_rates_are_rejected() {
        for bad in [-0.5, f64::NAN, f64::INFINITY] {
            let params = SimParams {
                leak_rate: bad,
                ..SimParams::default()
            };
            assert_eq!(
                simulate(SolutionState::new(), &params).unwrap_err(),
                DsdError::BadLeakRate
            );
        }
    }

    /// A gate poised so only a leak can open it: the upstream input is
    /// missing, and a waste strand's leading toehold fits the gate.
    fn leak_prone_state() -> SolutionState {
        let mut state = SolutionState::new();
        state
            .add_complex(and_gate("w1", "c", "out").unwrap(), 1)
            .unwrap();
        state.add_free(signal("c"), 1);
        state.add_waste(
            DsdStrand::new(vec![wire_toehold("w1"), wire_migration("noise")]),
            1,
        );
        state
    }

    #[test]
    fn zero_leak_rate_never_leaks() {
        for seed in 0..20u64 {
            let params = SimParams {
                seed,
                ..SimParams::default()
            };
            let report = simulate(leak_prone_state(), &params).unwrap();
            assert!(report.quiescent);
            assert!(report.trace.is_empty());
            assert_eq!(report.state.free_count(&signal("out")), 0);
        }
    }

    #[test]
    fn leak_opens_the_gate_and_keeps_the_catalyst() {
        let params = SimParams {
            seed: 1,
            leak_rate: 1.0,
            ..SimParams::default()
        };
        let state = leak_prone_state();
        let before = state.census();
        let report = simulate(state, &params).unwrap();
        assert!(report.quiescent);
        assert_eq!(report.state.census(), before);
        assert_eq!(report.state.free_count(&signal("out")), 1);
        assert_eq!(report.trace[0].rate_class, RateClass::Leak);
        // catalytic: the leaking strand is still in waste afterwards
        let noise = DsdStrand::new(vec![wire_toehold("w1"), wire_migration("noise")]);
        assert_eq!(report.state.waste_count(&noise), 1);
    }

    #[test]
    fn trace_serializes_as_json_lines() {
        let report = simulate(and_state(1, 1), &SimParams::default()).unwrap();
        let lines: Vec<String> = report
            .trace
            .iter()
            .map(|e| serde_json::to_string(e).unwrap())
            .collect();
        assert_eq!(lines.len(), 2);
        for (line, event) in lines.iter().zip(&report.trace) {
            let back: ReactionEvent = serde_json::from_str(line).unwrap();
            assert_eq!(&back, event);
        }
        assert!(lines[0].contains("\"rate_class\":\"normal\""));
    }

    #[test]
    fn state_json_round_trip_rejects_zero_counts() {
        let state = leak_prone_state();
        let json = serde_json::to_string(&state).unwrap();
        let back: SolutionState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, state);

        let zero = r#"{"free":[{"strand":[],"count":0}],"complexes":[],"waste":[]}"#;
        assert!(serde_json::from_str::<SolutionState>(zero).is_err());
    }

    proptest! {
        #[test]
        fn census_conservation_and_determinism(
            a in 0u64..3,
            b in 0u64..3,
            gates in 1u64..3,
            seed in 0u64..32,
        ) {
            let mut state = SolutionState::new();
            state
                .add_complex(and_gate("a", "b", "w").unwrap(), gates)
                .unwrap();
            state.add_free(signal("a"), a);
            state.add_free(signal("b"), b);
            let before = state.census();
            let params = SimParams { seed, ..SimParams::default() };
            let first = simulate(state.clone(), &params).unwrap();
            let second = simulate(state, &params).unwrap();
            prop_assert_eq!(&first.state, &second.state);
            prop_assert_eq!(&first.trace, &second.trace);
            prop_assert_eq!(first.state.census(), before);
            prop_assert!(first.quiescent);
            prop_assert_eq!(
                first.state.free_count(&signal("w")),
                a.min(b).min(gates)
            );
        }
    }
}
