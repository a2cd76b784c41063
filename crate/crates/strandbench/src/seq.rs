//! Nucleic-acid sequence primitives: bases, sequences, oligo pools, and
//! constraint-driven library design.
//!
//! A `Sequence` is an ordered run of DNA bases. An `OligoPool` is a multiset
//! of sequences with strictly positive counts; identical sequences merge.
//! Library design is seeded rejection sampling against a `DesignConstraints`
//! record, and `verify_library` re-checks a finished library independently,
//! so design output can always be round-tripped through verification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One DNA base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    A,
    C,
    G,
    T,
}

impl Base {
    /// Watson-Crick partner: A<->T, C<->G.
    pub fn complement(self) -> Base {
        match self {
            Base::A => Base::T,
            Base::T => Base::A,
            Base::C => Base::G,
            Base::G => Base::C,
        }
    }

    pub fn from_char(c: char) -> Option<Base> {
        match c.to_ascii_uppercase() {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'T' => Some(Base::T),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }

    fn from_index(i: u8) -> Base {
        match i {
            0 => Base::A,
            1 => Base::C,
            2 => Base::G,
            _ => Base::T,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("invalid base {found:?} at position {position}")]
    InvalidBase { position: usize, found: char },
}

/// An ordered run of DNA bases, possibly empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence(Vec<Base>);

impl Sequence {
    pub fn new(bases: Vec<Base>) -> Sequence {
        Sequence(bases)
    }

    pub fn bases(&self) -> &[Base] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Base-wise complement, preserving orientation.
    pub fn complement(&self) -> Sequence {
        Sequence(self.0.iter().map(|b| b.complement()).collect())
    }

    /// Complement read in reverse order.
    pub fn reverse_complement(&self) -> Sequence {
        Sequence(self.0.iter().rev().map(|b| b.complement()).collect())
    }

    /// Wallace-rule melting temperature in degrees Celsius:
    /// 2 * (#A + #T) + 4 * (#G + #C). The empty sequence melts at 0.
    pub fn melting_temp(&self) -> f64 {
        let weak = self
            .0
            .iter()
            .filter(|b| matches!(b, Base::A | Base::T))
            .count();
        let strong = self.0.len() - weak;
        (2 * weak + 4 * strong) as f64
    }

    /// Fraction of G/C bases; 0 for the empty sequence.
    pub fn gc_fraction(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        let gc = self
            .0
            .iter()
            .filter(|b| matches!(b, Base::G | Base::C))
            .count();
        gc as f64 / self.0.len() as f64
    }

    /// Length of the longest single-base run; 0 for the empty sequence.
    pub fn longest_homopolymer(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        let mut prev = None;
        for &b in &self.0 {
            run = if prev == Some(b) { run + 1 } else { 1 };
            best = best.max(run);
            prev = Some(b);
        }
        best
    }

    pub fn starts_with(&self, prefix: &Sequence) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn ends_with(&self, suffix: &Sequence) -> bool {
        self.0.ends_with(&suffix.0)
    }

    /// True when `probe` occurs as a contiguous subsequence.
    pub fn contains(&self, probe: &Sequence) -> bool {
        if probe.is_empty() {
            return true;
        }
        self.0.windows(probe.len()).any(|w| w == probe.bases())
    }

    /// Concatenation of `self` followed by `other`.
    pub fn concat(&self, other: &Sequence) -> Sequence {
        let mut bases = self.0.clone();
        bases.extend_from_slice(&other.0);
        Sequence(bases)
    }

    pub fn slice(&self, start: usize, end: usize) -> Sequence {
        Sequence(self.0[start..end].to_vec())
    }

    /// Uniform random sequence of `len` bases.
    pub fn random(len: usize, rng: &mut impl Rng) -> Sequence {
        Sequence(
            (0..len)
                .map(|_| Base::from_index(rng.gen_range(0..4)))
                .collect(),
        )
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", b.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Sequence {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Sequence, SequenceError> {
        s.chars()
            .enumerate()
            .map(|(i, c)| {
                Base::from_char(c).ok_or(SequenceError::InvalidBase {
                    position: i,
                    found: c,
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Sequence)
    }
}

impl Serialize for Sequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Sequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Sequence, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Positions at which two equal-length sequences differ.
///
/// Panics if lengths differ; distance is undefined in that case.
pub fn hamming_distance(a: &Sequence, b: &Sequence) -> usize {
    assert_eq!(a.len(), b.len(), "hamming distance needs equal lengths");
    a.bases()
        .iter()
        .zip(b.bases())
        .filter(|(x, y)| x != y)
        .count()
}

/// The constraint families a designed library must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Length,
    GcFraction,
    MeltingTemp,
    MinHamming,
    MaxHomopolymer,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ConstraintKind::Length => "length",
            ConstraintKind::GcFraction => "gc_fraction",
            ConstraintKind::MeltingTemp => "tm_window",
            ConstraintKind::MinHamming => "min_hamming",
            ConstraintKind::MaxHomopolymer => "max_homopolymer",
        };
        f.write_str(name)
    }
}

/// Design targets for a sequence library.
///
/// Intervals are closed. `min_hamming` applies pairwise between every
/// sequence and every other sequence, that sequence's complement, and its
/// reverse complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignConstraints {
    pub length: usize,
    pub gc_fraction: (f64, f64),
    pub tm_window: (f64, f64),
    pub min_hamming: usize,
    pub max_homopolymer: usize,
}

impl DesignConstraints {
    /// Constraints satisfied by any sequence of the given length.
    pub fn any(length: usize) -> DesignConstraints {
        DesignConstraints {
            length,
            gc_fraction: (0.0, 1.0),
            tm_window: (0.0, 4.0 * length as f64),
            min_hamming: 0,
            max_homopolymer: length.max(1),
        }
    }

    /// First structurally unsatisfiable constraint, if any.
    pub fn validate(&self) -> Result<(), ConstraintKind> {
        if !(0.0..=1.0).contains(&self.gc_fraction.0)
            || !(0.0..=1.0).contains(&self.gc_fraction.1)
            || self.gc_fraction.0 > self.gc_fraction.1
        {
            return Err(ConstraintKind::GcFraction);
        }
        if self.tm_window.0 > self.tm_window.1 {
            return Err(ConstraintKind::MeltingTemp);
        }
        if self.min_hamming > self.length {
            return Err(ConstraintKind::MinHamming);
        }
        if self.max_homopolymer < 1 {
            return Err(ConstraintKind::MaxHomopolymer);
        }
        Ok(())
    }
}

/// One broken constraint found by `verify_library`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    Length {
        index: usize,
        actual: usize,
    },
    GcFraction {
        index: usize,
        actual: f64,
    },
    MeltingTemp {
        index: usize,
        actual: f64,
    },
    Homopolymer {
        index: usize,
        run: usize,
    },
    Distance {
        a: usize,
        b: usize,
        against: CrossCheck,
        distance: usize,
    },
}

/// Which strand of the partner a distance violation was measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrossCheck {
    Identity,
    Complement,
    ReverseComplement,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Length { index, actual } => {
                write!(f, "sequence {index}: length {actual} outside target")
            }
            Violation::GcFraction { index, actual } => {
                write!(
                    f,
                    "sequence {index}: GC fraction {actual:.3} outside window"
                )
            }
            Violation::MeltingTemp { index, actual } => {
                write!(
                    f,
                    "sequence {index}: melting temperature {actual} outside window"
                )
            }
            Violation::Homopolymer { index, run } => {
                write!(
                    f,
                    "sequence {index}: homopolymer run of {run} exceeds limit"
                )
            }
            Violation::Distance {
                a,
                b,
                against,
                distance,
            } => {
                let which = match against {
                    CrossCheck::Identity => "sequence",
                    CrossCheck::Complement => "complement of sequence",
                    CrossCheck::ReverseComplement => "reverse complement of sequence",
                };
                write!(
                    f,
                    "sequence {a} vs {which} {b}: distance {distance} below minimum"
                )
            }
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DesignError {
    #[error("library design is infeasible: {constraint} cannot be satisfied")]
    Unsatisfiable { constraint: ConstraintKind },
    #[error(
        "design budget of {budget} attempts exhausted at sequence {index}: \
         {constraint} was the binding constraint"
    )]
    BudgetExhausted {
        index: usize,
        budget: u32,
        constraint: ConstraintKind,
    },
}

/// Attempts allowed per sequence before design gives up.
pub const DESIGN_ATTEMPT_BUDGET: u32 = 10_000;

/// Position of a constraint in the candidate checking order.
fn check_depth(kind: ConstraintKind) -> u8 {
    match kind {
        ConstraintKind::Length => 0,
        ConstraintKind::GcFraction => 1,
        ConstraintKind::MeltingTemp => 2,
        ConstraintKind::MaxHomopolymer => 3,
        ConstraintKind::MinHamming => 4,
    }
}

/// Checks one candidate against the per-sequence constraints.
fn single_sequence_rejection(c: &DesignConstraints, s: &Sequence) -> Option<ConstraintKind> {
    if s.len() != c.length {
        return Some(ConstraintKind::Length);
    }
    let gc = s.gc_fraction();
    if gc < c.gc_fraction.0 || gc > c.gc_fraction.1 {
        return Some(ConstraintKind::GcFraction);
    }
    let tm = s.melting_temp();
    if tm < c.tm_window.0 || tm > c.tm_window.1 {
        return Some(ConstraintKind::MeltingTemp);
    }
    if s.longest_homopolymer() > c.max_homopolymer {
        return Some(ConstraintKind::MaxHomopolymer);
    }
    None
}

/// True when `cand` keeps the required distance from `other` on all three
/// cross-checks (identity, complement, reverse complement).
fn far_enough(cand: &Sequence, other: &Sequence, min: usize) -> bool {
    hamming_distance(cand, other) >= min
        && hamming_distance(cand, &other.complement()) >= min
        && hamming_distance(cand, &other.reverse_complement()) >= min
}

/// Designs `k` sequences satisfying `c` by seeded rejection sampling.
///
/// Identical seeds yield identical libraries. When the attempt budget runs
/// out, the error names the constraint that rejected the most candidates.
pub fn design_library(
    c: &DesignConstraints,
    k: usize,
    seed: u64,
) -> Result<Vec<Sequence>, DesignError> {
    assert!(k >= 1, "a library holds at least one sequence");
    if let Err(constraint) = c.validate() {
        return Err(DesignError::Unsatisfiable { constraint });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted: Vec<Sequence> = Vec::with_capacity(k);
    for index in 0..k {
        // The reported constraint is the deepest check any candidate failed:
        // a candidate rejected on distance already satisfied everything
        // upstream, so distance is what the budget could not satisfy.
        let mut deepest: Option<ConstraintKind> = None;
        let mut found = None;
        for _ in 0..DESIGN_ATTEMPT_BUDGET {
            let cand = Sequence::random(c.length, &mut rng);
            let rejection = single_sequence_rejection(c, &cand).or_else(|| {
                let clash = c.min_hamming > 0
                    && !accepted.iter().all(|s| far_enough(&cand, s, c.min_hamming));
                clash.then_some(ConstraintKind::MinHamming)
            });
            match rejection {
                Some(kind) => {
                    if deepest.is_none_or(|d| check_depth(kind) > check_depth(d)) {
                        deepest = Some(kind);
                    }
                }
                None => {
                    found = Some(cand);
                    break;
                }
            }
        }
        match found {
            Some(s) => accepted.push(s),
            None => {
                return Err(DesignError::BudgetExhausted {
                    index,
                    budget: DESIGN_ATTEMPT_BUDGET,
                    constraint: deepest.unwrap_or(ConstraintKind::Length),
                });
            }
        }
    }
    Ok(accepted)
}

/// Re-checks a finished library against `c` and reports every violation.
///
/// An empty report means the library is compliant. Distance checks compare
/// each pair of distinct sequences on identity, complement, and reverse
/// complement; pairs of unequal length are skipped (their length violations
/// are already reported).
pub fn verify_library(seqs: &[Sequence], c: &DesignConstraints) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, s) in seqs.iter().enumerate() {
        if s.len() != c.length {
            out.push(Violation::Length {
                index: i,
                actual: s.len(),
            });
        }
        let gc = s.gc_fraction();
        if gc < c.gc_fraction.0 || gc > c.gc_fraction.1 {
            out.push(Violation::GcFraction {
                index: i,
                actual: gc,
            });
        }
        let tm = s.melting_temp();
        if tm < c.tm_window.0 || tm > c.tm_window.1 {
            out.push(Violation::MeltingTemp {
                index: i,
                actual: tm,
            });
        }
        let run = s.longest_homopolymer();
        if run > c.max_homopolymer {
            out.push(Violation::Homopolymer { index: i, run });
        }
    }
    for a in 0..seqs.len() {
        for b in (a + 1)..seqs.len() {
            if seqs[a].len() != seqs[b].len() {
                continue;
            }
            let checks = [
                (CrossCheck::Identity, seqs[b].clone()),
                (CrossCheck::Complement, seqs[b].complement()),
                (CrossCheck::ReverseComplement, seqs[b].reverse_complement()),
            ];
            for (against, other) in checks {
                let distance = hamming_distance(&seqs[a], &other);
                if distance < c.min_hamming {
                    out.push(Violation::Distance {
                        a,
                        b,
                        against,
                        distance,
                    });
                }
            }
        }
    }
    out
}

/// A multiset of sequences with strictly positive counts.
///
/// Entries are kept sorted, so iteration order and serialization are
/// deterministic. Inserting an existing sequence merges counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OligoPool {
    entries: BTreeMap<Sequence, u64>,
}

impl OligoPool {
    pub fn new() -> OligoPool {
        OligoPool::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (Sequence, u64)>>(entries: I) -> OligoPool {
        let mut pool = OligoPool::new();
        for (seq, count) in entries {
            pool.insert(seq, count);
        }
        pool
    }

    /// Adds `count` copies; zero counts are ignored so the positive-count
    /// invariant holds by construction.
    pub fn insert(&mut self, seq: Sequence, count: u64) {
        if count == 0 {
            return;
        }
        *self.entries.entry(seq).or_insert(0) += count;
    }

    pub fn count(&self, seq: &Sequence) -> u64 {
        self.entries.get(seq).copied().unwrap_or(0)
    }

    /// Number of distinct sequences.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sequence, u64)> {
        self.entries.iter().map(|(s, &c)| (s, c))
    }

    pub fn total_strands(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn total_bases(&self) -> u64 {
        self.entries.iter().map(|(s, &c)| s.len() as u64 * c).sum()
    }

    /// Cuts every occurrence of `site` in every sequence, immediately after
    /// the site's last base, scanning leftmost-first without overlap.
    /// Fragments inherit their parent's count and merge into the result.
    /// Total base count is conserved.
    ///
    /// Panics if `site` is empty; a cut site has at least one base.
    pub fn cleave(&self, site: &Sequence) -> OligoPool {
        assert!(!site.is_empty(), "cut site has at least one base");
        let mut out = OligoPool::new();
        for (seq, count) in self.iter() {
            for fragment in split_after_site(seq, site) {
                out.insert(fragment, count);
            }
        }
        out
    }

    /// Keeps entries whose length lies in the closed interval [min, max].
    ///
    /// Panics if `min > max`.
    pub fn filter_by_length(&self, min: usize, max: usize) -> OligoPool {
        assert!(min <= max, "length window is ordered");
        OligoPool {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| (min..=max).contains(&s.len()))
                .map(|(s, &c)| (s.clone(), c))
                .collect(),
        }
    }

    /// Keeps entries starting with `head` and ending with `tail`, then
    /// multiplies their counts by `gain` (amplification).
    ///
    /// Panics if `gain` is zero.
    pub fn pcr_select(&self, head: &Sequence, tail: &Sequence, gain: u64) -> OligoPool {
        assert!(gain >= 1, "amplification gain is at least 1");
        OligoPool {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| s.starts_with(head) && s.ends_with(tail))
                .map(|(s, &c)| (s.clone(), c * gain))
                .collect(),
        }
    }

    /// Keeps entries containing `probe` as a contiguous subsequence.
    ///
    /// Panics if `probe` is empty.
    pub fn affinity_select(&self, probe: &Sequence) -> OligoPool {
        assert!(!probe.is_empty(), "probe has at least one base");
        OligoPool {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| s.contains(probe))
                .map(|(s, &c)| (s.clone(), c))
                .collect(),
        }
    }
}

/// Splits after each leftmost non-overlapping occurrence of `site`,
/// dropping the empty trailing fragment when the sequence ends on a site.
fn split_after_site(seq: &Sequence, site: &Sequence) -> Vec<Sequence> {
    let bases = seq.bases();
    let needle = site.bases();
    let mut cuts = Vec::new();
    let mut i = 0;
    while i + needle.len() <= bases.len() {
        if &bases[i..i + needle.len()] == needle {
            cuts.push(i + needle.len());
            i += needle.len();
        } else {
            i += 1;
        }
    }
    let mut fragments = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for cut in cuts {
        fragments.push(seq.slice(start, cut));
        start = cut;
    }
    if start < bases.len() {
        fragments.push(seq.slice(start, bases.len()));
    }
    if fragments.is_empty() && !bases.is_empty() {
        fragments.push(seq.clone());
    }
    fragments
}

#[derive(Serialize, Deserialize)]
struct PoolEntryRepr {
    seq: Sequence,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct PoolRepr {
    entries: Vec<PoolEntryRepr>,
}

impl Serialize for OligoPool {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = PoolRepr {
            entries: self
                .iter()
                .map(|(s, c)| PoolEntryRepr {
                    seq: s.clone(),
                    count: c,
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OligoPool {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<OligoPool, D::Error> {
        let repr = PoolRepr::deserialize(deserializer)?;
        let mut pool = OligoPool::new();
        for entry in repr.entries {
            if entry.count == 0 {
                return Err(D::Error::custom("pool entry count must be at least 1"));
            }
            pool.insert(entry.seq, entry.count);
        }
        Ok(pool)
    }
}
