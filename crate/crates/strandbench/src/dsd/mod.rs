//! Domain-level toehold-mediated strand displacement.
//!
//! Strands are sequences of named domains, each a short toehold or a long
//! migration domain. A domain binds its complement: same id, opposite
//! orientation. A gate complex is one fully-complemented backbone strand
//! with incumbent strands bound along it; backbone positions no incumbent
//! covers are exposed, and exposed toeholds are where reactions start.
//!
//! An invasion begins when a free strand's leading domain binds an exposed
//! toehold and the whole strand complements the backbone window it would
//! occupy. Branch migration then strips every incumbent starting inside
//! the window; an incumbent whose binding continues at or past the
//! window's end is carried off too if the positions past the end are all
//! toeholds (toehold exchange), and blocks the invasion otherwise.
//! Displaced strands that lead with a toehold stay reactive and return to
//! solution; the rest are spent and drop to waste.
//!
//! Leak models spurious displacement by waste: a waste strand whose
//! leading domain fits an exposed toehold may strip the same window
//! without the complementarity check, never binding — it survives as
//! waste, and the complex just loses the displaced incumbents.

pub mod gates;
pub mod sim;

pub use gates::{
    and_gate, kand_gate, not_gates, or_gates, signal, translator, wire_migration, wire_toehold,
    ThresholdOutcome, ThresholdSystem,
};
pub use sim::{simulate, RateClass, ReactionEvent, SimParams, SimReport, SolutionState};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Short binding-initiation domain vs long branch-migration domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DomainKind {
    #[serde(rename = "t")]
    Toehold,
    #[serde(rename = "m")]
    Migration,
}

/// A named domain with an orientation. `comp` marks the complemented
/// (starred) strand of the pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Domain {
    pub id: String,
    pub kind: DomainKind,
    pub comp: bool,
}

impl Domain {
    /// True when the two domains hybridize: same id and kind, opposite
    /// orientation.
    pub fn binds(&self, other: &Domain) -> bool {
        self.id == other.id && self.kind == other.kind && self.comp != other.comp
    }

    /// The complementary domain.
    pub fn star(&self) -> Domain {
        Domain {
            comp: !self.comp,
            ..self.clone()
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.id, if self.comp { "*" } else { "" })
    }
}

/// A single strand: domains listed 5' to 3'.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DsdStrand(pub Vec<Domain>);

impl DsdStrand {
    pub fn new(domains: Vec<Domain>) -> DsdStrand {
        DsdStrand(domains)
    }

    pub fn domains(&self) -> &[Domain] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// A strand that leads with a toehold can initiate further reactions;
    /// displaced strands that do not are routed to waste.
    pub fn leads_with_toehold(&self) -> bool {
        self.0
            .first()
            .is_some_and(|d| d.kind == DomainKind::Toehold)
    }
}

impl fmt::Display for DsdStrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// A strand bound along a complex's backbone: the leading `bound_len`
/// domains pair with backbone positions `start..start + bound_len`, the
/// rest overhang unbound.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Incumbent {
    pub strand: DsdStrand,
    pub start: usize,
    pub bound_len: usize,
}

impl Incumbent {
    fn end(&self) -> usize {
        self.start + self.bound_len
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DsdError {
    #[error("incumbent {index} binds nothing")]
    EmptyBinding { index: usize },
    #[error("incumbent {index} extends past the backbone")]
    OutOfRange { index: usize },
    #[error("incumbent {index} binds more domains than it has")]
    BindingTooLong { index: usize },
    #[error("incumbent {index} does not pair with the backbone at position {position}")]
    BindingMismatch { index: usize, position: usize },
    #[error("incumbent {index} overlaps the previous incumbent")]
    OverlappingIncumbents { index: usize },
    #[error("gate wires must be distinct, but {wire:?} repeats")]
    DuplicateWire { wire: String },
    #[error("a multi-input gate needs at least 2 inputs")]
    TooFewInputs,
    #[error("threshold must be at least 1")]
    BadThreshold,
    #[error("leak rate must be finite and non-negative")]
    BadLeakRate,
    #[error("count must be positive")]
    ZeroCount,
}

/// One eligible displacement: the invader lands at backbone position
/// `position` and the listed incumbents (by index) are released.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvasionSite {
    pub position: usize,
    pub displaced: Vec<usize>,
}

/// A backbone strand with incumbents bound along it. Immutable: reactions
/// produce new complexes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GateComplex {
    pub name: String,
    pub backbone: DsdStrand,
    pub incumbents: Vec<Incumbent>,
}

impl GateComplex {
    /// Checks the structural invariants: incumbents sorted, disjoint,
    /// in range, and complementary to the backbone where bound.
    pub fn validate(&self) -> Result<(), DsdError> {
        let mut prev_end = 0;
        for (index, inc) in self.incumbents.iter().enumerate() {
            if inc.bound_len == 0 {
                return Err(DsdError::EmptyBinding { index });
            }
            if inc.bound_len > inc.strand.len() {
                return Err(DsdError::BindingTooLong { index });
            }
            if inc.end() > self.backbone.len() {
                return Err(DsdError::OutOfRange { index });
            }
            if index > 0 && inc.start < prev_end {
                return Err(DsdError::OverlappingIncumbents { index });
            }
            for offset in 0..inc.bound_len {
                let position = inc.start + offset;
                if !inc.strand.0[offset].binds(&self.backbone.0[position]) {
                    return Err(DsdError::BindingMismatch { index, position });
                }
            }
            prev_end = inc.end();
        }
        Ok(())
    }

    fn is_covered(&self, position: usize) -> bool {
        self.incumbents
            .iter()
            .any(|inc| inc.start <= position && position < inc.end())
    }

    /// Backbone positions that are uncovered toeholds, ascending.
    pub fn exposed_toeholds(&self) -> Vec<usize> {
        (0..self.backbone.len())
            .filter(|&p| self.backbone.0[p].kind == DomainKind::Toehold && !self.is_covered(p))
            .collect()
    }

    /// Incumbents released by an invader occupying `window_start..window_end`:
    /// every incumbent starting in `window_start + 1..=window_end`, provided
    /// each one's bound positions at or past `window_end` are all toeholds.
    /// Returns None when some reached incumbent holds on (blocked).
    fn displacement_set(&self, window_start: usize, window_end: usize) -> Option<Vec<usize>> {
        let mut displaced = Vec::new();
        for (index, inc) in self.incumbents.iter().enumerate() {
            if inc.start <= window_start || inc.start > window_end {
                continue;
            }
            let tail_is_toehold = (inc.start..inc.end())
                .filter(|&q| q >= window_end)
                .all(|q| self.backbone.0[q].kind == DomainKind::Toehold);
            if !tail_is_toehold {
                return None;
            }
            displaced.push(index);
        }
        Some(displaced)
    }

    /// Eligible exact invasions by a free strand: the leading domain binds
    /// an exposed toehold and the whole strand complements its window.
    pub fn invasion_sites(&self, free: &DsdStrand) -> Vec<InvasionSite> {
        let Some(lead) = free.0.first() else {
            return Vec::new();
        };
        let mut sites = Vec::new();
        for p in self.exposed_toeholds() {
            if !lead.binds(&self.backbone.0[p]) {
                continue;
            }
            let window_end = p + free.len();
            if window_end > self.backbone.len() {
                continue;
            }
            let complementary = (1..free.len()).all(|i| free.0[i].binds(&self.backbone.0[p + i]));
            if !complementary {
                continue;
            }
            if let Some(displaced) = self.displacement_set(p, window_end) {
                sites.push(InvasionSite {
                    position: p,
                    displaced,
                });
            }
        }
        sites
    }

    /// Eligible sloppy invasions by a waste strand: only the leading
    /// domain must fit, the window clamps to the backbone, and at least
    /// one incumbent must come off. The intruder never binds.
    pub fn leak_sites(&self, intruder: &DsdStrand) -> Vec<InvasionSite> {
        let Some(lead) = intruder.0.first() else {
            return Vec::new();
        };
        let mut sites = Vec::new();
        for p in self.exposed_toeholds() {
            if !lead.binds(&self.backbone.0[p]) {
                continue;
            }
            let window_end = (p + intruder.len()).min(self.backbone.len());
            match self.displacement_set(p, window_end) {
                Some(displaced) if !displaced.is_empty() => {
                    sites.push(InvasionSite {
                        position: p,
                        displaced,
                    });
                }
                _ => {}
            }
        }
        sites
    }

    /// Applies an exact invasion: the free strand becomes a fully bound
    /// incumbent and the site's incumbents are released, in index order.
    pub fn apply_invasion(
        &self,
        free: &DsdStrand,
        site: &InvasionSite,
    ) -> (GateComplex, Vec<DsdStrand>) {
        let mut released = Vec::new();
        let mut incumbents = Vec::new();
        for (index, inc) in self.incumbents.iter().enumerate() {
            if site.displaced.contains(&index) {
                released.push(inc.strand.clone());
            } else {
                incumbents.push(inc.clone());
            }
        }
        incumbents.push(Incumbent {
            strand: free.clone(),
            start: site.position,
            bound_len: free.len(),
        });
        incumbents.sort_by_key(|inc| inc.start);
        let next = GateComplex {
            name: self.name.clone(),
            backbone: self.backbone.clone(),
            incumbents,
        };
        debug_assert_eq!(next.validate(), Ok(()));
        (next, released)
    }

    /// Applies a leak: the site's incumbents are released and nothing
    /// takes their place.
    pub fn apply_leak(&self, site: &InvasionSite) -> (GateComplex, Vec<DsdStrand>) {
        let mut released = Vec::new();
        let mut incumbents = Vec::new();
        for (index, inc) in self.incumbents.iter().enumerate() {
            if site.displaced.contains(&index) {
                released.push(inc.strand.clone());
            } else {
                incumbents.push(inc.clone());
            }
        }
        let next = GateComplex {
            name: self.name.clone(),
            backbone: self.backbone.clone(),
            incumbents,
        };
        debug_assert_eq!(next.validate(), Ok(()));
        (next, released)
    }
}

impl fmt::Display for GateComplex {
    /// Name plus occupancy: each incumbent as start+bound_len.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.name)?;
        for (i, inc) in self.incumbents.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}+{}", inc.start, inc.bound_len)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::gates::{and_gate, signal, wire_migration, wire_toehold};
    use super::*;
    use proptest::prelude::*;

    fn dom(id: &str, kind: DomainKind, comp: bool) -> Domain {
        Domain {
            id: id.to_string(),
            kind,
            comp,
        }
    }

    #[test]
    fn binding_needs_same_id_same_kind_opposite_orientation() {
        let t = wire_toehold("a");
        assert!(t.binds(&t.star()));
        assert!(t.star().binds(&t));
        assert!(!t.binds(&t));
        assert!(!t.binds(&wire_toehold("b").star()));
        assert!(!t.binds(&dom("a.t", DomainKind::Migration, true)));
    }

    #[test]
    fn validate_rejects_each_malformed_shape() {
        let gate = and_gate("a", "b", "w").unwrap();
        assert_eq!(gate.validate(), Ok(()));

        let mut zero = gate.clone();
        zero.incumbents[0].bound_len = 0;
        assert_eq!(zero.validate(), Err(DsdError::EmptyBinding { index: 0 }));

        let mut long = gate.clone();
        long.incumbents[0].bound_len = 3;
        assert_eq!(long.validate(), Err(DsdError::BindingTooLong { index: 0 }));

        let mut out = gate.clone();
        out.incumbents[2].start = 5;
        assert_eq!(out.validate(), Err(DsdError::OutOfRange { index: 2 }));

        let mut overlap = gate.clone();
        overlap.incumbents[1].start = 2;
        assert_eq!(
            overlap.validate(),
            Err(DsdError::OverlappingIncumbents { index: 1 })
        );

        let mut mismatch = gate.clone();
        mismatch.incumbents[1].strand = signal("q");
        mismatch.incumbents[1].bound_len = 1;
        assert_eq!(
            mismatch.validate(),
            Err(DsdError::BindingMismatch {
                index: 1,
                position: 3
            })
        );
    }

    #[test]
    fn fresh_and_gate_exposes_only_the_first_toehold() {
        let gate = and_gate("a", "b", "w").unwrap();
        assert_eq!(gate.exposed_toeholds(), vec![0]);
    }

    #[test]
    fn invasion_strips_the_window_and_pops_toehold_tails() {
        let gate = and_gate("a", "b", "w").unwrap();

        let sites = gate.invasion_sites(&signal("a"));
        assert_eq!(
            sites,
            vec![InvasionSite {
                position: 0,
                displaced: vec![0]
            }]
        );
        assert!(gate.invasion_sites(&signal("b")).is_empty());
        assert!(gate.invasion_sites(&signal("w")).is_empty());

        let (half, released) = gate.apply_invasion(&signal("a"), &sites[0]);
        assert_eq!(released.len(), 1);
        assert!(!released[0].leads_with_toehold());
        assert_eq!(half.exposed_toeholds(), vec![2]);

        let sites = half.invasion_sites(&signal("b"));
        assert_eq!(
            sites,
            vec![InvasionSite {
                position: 2,
                displaced: vec![1, 2]
            }]
        );
        let (spent, released) = half.apply_invasion(&signal("b"), &sites[0]);
        assert_eq!(released.len(), 2);
        // the linker drops to waste, the output stays reactive
        assert!(!released[0].leads_with_toehold());
        assert_eq!(released[1], signal("w"));
        assert!(released[1].leads_with_toehold());
        assert_eq!(spent.exposed_toeholds(), vec![4]);
        // the freed output cannot re-enter: its window would overrun
        assert!(spent.invasion_sites(&signal("w")).is_empty());
    }

    #[test]
    fn migration_tail_past_the_window_blocks_invasion() {
        let backbone = DsdStrand::new(vec![
            wire_toehold("a").star(),
            wire_migration("a").star(),
            wire_toehold("b").star(),
            wire_migration("b").star(),
        ]);
        let clamp = Incumbent {
            strand: DsdStrand::new(vec![
                wire_migration("a"),
                wire_toehold("b"),
                wire_migration("b"),
            ]),
            start: 1,
            bound_len: 3,
        };
        let complex = GateComplex {
            name: "CLAMP".to_string(),
            backbone,
            incumbents: vec![clamp],
        };
        complex.validate().unwrap();
        assert!(complex.invasion_sites(&signal("a")).is_empty());
    }

    #[test]
    fn leaks_are_sloppy_but_need_a_displacement() {
        let gate = and_gate("a", "b", "w").unwrap();

        // leading toehold fits, second domain is nonsense: still leaks
        let noise = DsdStrand::new(vec![wire_toehold("a"), wire_migration("junk")]);
        let sites = gate.leak_sites(&noise);
        assert_eq!(
            sites,
            vec![InvasionSite {
                position: 0,
                displaced: vec![0]
            }]
        );
        let (after, released) = gate.apply_leak(&sites[0]);
        assert_eq!(released.len(), 1);
        assert_eq!(after.incumbents.len(), 2);
        assert_eq!(after.exposed_toeholds(), vec![0, 2]);
        // a second identical leak has nothing left to displace
        assert!(after.leak_sites(&noise).is_empty());

        // a bare toehold reaches only the first migration domain: blocked
        let stub = DsdStrand::new(vec![wire_toehold("a")]);
        assert!(gate.leak_sites(&stub).is_empty());

        // exact invasion rejects the sloppy strand
        assert!(gate.invasion_sites(&noise).is_empty());
    }

    #[test]
    fn complex_json_round_trip() {
        let gate = and_gate("a", "b", "w").unwrap();
        let json = serde_json::to_string(&gate).unwrap();
        let back: GateComplex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, gate);
        assert_eq!(back.validate(), Ok(()));
    }

    #[test]
    fn display_formats_show_occupancy() {
        let gate = and_gate("a", "b", "w").unwrap();
        assert_eq!(gate.to_string(), "AND(a,b->w)[1+2 3+1 4+1]");
        assert_eq!(signal("a").to_string(), "[a.t a.m]");
        assert_eq!(wire_toehold("a").star().to_string(), "a.t*");
    }

    proptest! {
        /// Any invasion preserves strand material: released strands plus
        /// the bound invader account for everything that changed.
        #[test]
        fn invasion_conserves_strand_material(seed_wire in "[a-d]") {
            let gate = and_gate("a", "b", "w").unwrap();
            let free = signal(&seed_wire);
            for site in gate.invasion_sites(&free) {
                let (next, released) = gate.apply_invasion(&free, &site);
                prop_assert_eq!(next.validate(), Ok(()));
                prop_assert_eq!(
                    next.incumbents.len() + released.len(),
                    gate.incumbents.len() + 1
                );
                let bound: Vec<_> =
                    next.incumbents.iter().map(|i| &i.strand).collect();
                prop_assert!(bound.contains(&&free));
            }
        }
    }
}
