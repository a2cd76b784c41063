//! Scaling arithmetic for brute-force molecular search.
//!
//! Answers, with exact big-integer combinatorics, what it would cost to
//! materialize every candidate path of an n-city tour as physical DNA:
//! how many path strands exist, how long each is, what the whole library
//! weighs, and how short the per-segment alphabet is allowed to get before
//! segments collide. A small technology comparison table puts the molecular
//! numbers next to semiconductor ones.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Avogadro's number, exact by SI definition (1/mol).
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// Average molar mass of one base pair in g/mol.
pub const MASS_PER_BP: f64 = 660.0;

/// Parameters of a brute-force tour-search feasibility question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspQuery {
    /// Number of cities (distinct nodes).
    pub n: u64,
    /// Bases encoding one city segment.
    pub seg_len: u64,
    /// Physical copies of each candidate path strand.
    pub copies: u64,
    /// Average molar mass of a base pair, g/mol.
    pub mass_per_bp: f64,
}

impl TspQuery {
    /// The headline instance: 62 cities, 150-base segments, 100 copies.
    pub fn standard(n: u64) -> TspQuery {
        TspQuery {
            n,
            seg_len: 150,
            copies: 100,
            mass_per_bp: MASS_PER_BP,
        }
    }
}

/// Exact number of candidate tours: n!.
pub fn path_count(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Bases in one candidate path strand: (2n - 1) segments of `seg_len`.
///
/// A path over n cities concatenates n city segments and n - 1 linker
/// segments. Panics when `n` is zero; a path visits at least one city.
pub fn path_strand_length(n: u64, seg_len: u64) -> u64 {
    assert!(n >= 1, "a path visits at least one city");
    (2 * n - 1) * seg_len
}

/// Mass in kilograms of the full candidate library:
/// n! * copies * strand_length * mass_per_bp / Avogadro / 1000.
///
/// The count n! * copies * strand_length is carried exactly as a big
/// integer and only the final scaling is floating point.
pub fn total_mass_kg(q: &TspQuery) -> f64 {
    let strands = path_count(q.n) * q.copies * path_strand_length(q.n, q.seg_len);
    let bases = strands.to_f64().unwrap_or(f64::INFINITY);
    bases * q.mass_per_bp / AVOGADRO / 1000.0
}

/// Distinct oligo species a graph encoding needs: n node segments,
/// n(n-1)/2 worst-case linkers, and n splints, totalling n(n+3)/2.
pub fn strands_required(n: u64) -> u64 {
    n * (n + 3) / 2
}

/// Number of distinct sequences of length `len` over a 4-letter alphabet.
pub fn unique_capacity(len: u64) -> BigUint {
    BigUint::from(4u32).pow(u32::try_from(len).expect("segment length fits in u32"))
}

/// Smallest segment length whose 4^L capacity reaches `k` sequences.
pub fn min_length_for(k: &BigUint) -> u64 {
    let mut len = 0;
    let mut capacity = BigUint::one();
    while capacity < *k {
        capacity *= 4u32;
        len += 1;
    }
    len
}

/// One technology column in the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechProfile {
    pub name: String,
    /// Cubic nanometers needed to store one bit.
    pub nm3_per_bit: f64,
    /// Operations per second, low and high bound.
    pub ops_per_second: (f64, f64),
    /// Operations per Joule.
    pub ops_per_joule: f64,
    /// Joules consumed by one elementary operation, when characterized.
    pub joules_per_op: Option<f64>,
    /// How the substrate executes work.
    pub architecture: String,
}

impl TechProfile {
    pub fn dna() -> TechProfile {
        TechProfile {
            name: "DNA".to_string(),
            nm3_per_bit: 1.0,
            ops_per_second: (1e14, 1e20),
            ops_per_joule: 2e19,
            joules_per_op: Some(5e-20),
            architecture: "massively parallel".to_string(),
        }
    }

    pub fn silicon() -> TechProfile {
        TechProfile {
            name: "silicon".to_string(),
            nm3_per_bit: 1e12,
            ops_per_second: (1e8, 1e12),
            ops_per_joule: 1e9,
            joules_per_op: Some(1e-9),
            architecture: "sequential".to_string(),
        }
    }
}

/// Storage, speed, and energy comparison between substrates.
pub fn comparison_report() -> Vec<TechProfile> {
    vec![TechProfile::dna(), TechProfile::silicon()]
}

/// The complete feasibility report for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// n! as a decimal string (exact).
    pub paths: String,
    /// Bases per candidate path strand.
    pub strand_bp: u64,
    /// Mass of the complete candidate library, kg.
    pub mass_kg: f64,
    /// Distinct oligo species the encoding consumes.
    pub strands_required: u64,
    /// Information-theoretic lower bound on segment length for that many
    /// distinct species.
    pub capacity_bound_bp: u64,
}

/// Assembles the report for `q`.
pub fn report(q: &TspQuery) -> FeasibilityReport {
    let needed = strands_required(q.n);
    FeasibilityReport {
        paths: path_count(q.n).to_string(),
        strand_bp: path_strand_length(q.n, q.seg_len),
        mass_kg: total_mass_kg(q),
        strands_required: needed,
        capacity_bound_bp: min_length_for(&BigUint::from(needed)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// |actual/expected - 1|, the relative error against a reference value.
    fn rel_err(actual: f64, expected: f64) -> f64 {
        (actual / expected - 1.0).abs()
    }

    /// Oracle: factorial by repeated addition-free checked multiplication
    /// over u128, valid through 33!.
    fn small_factorial(n: u64) -> u128 {
        (2..=u128::from(n)).product::<u128>().max(1)
    }

    #[test]
    fn path_count_matches_exact_factorials() {
        assert_eq!(path_count(0), BigUint::one());
        assert_eq!(path_count(1), BigUint::one());
        for n in 2..=30u64 {
            assert_eq!(path_count(n), BigUint::from(small_factorial(n)));
        }
    }

    #[test]
    fn headline_path_count_magnitude() {
        let c = path_count(62).to_f64().unwrap();
        assert!(rel_err(c, 3.15e85) < 0.005, "62! = {c:e}");
    }

    #[test]
    fn strand_length_law() {
        assert_eq!(path_strand_length(62, 150), 18_450);
        assert_eq!(path_strand_length(5, 10), 90);
        assert_eq!(path_strand_length(1, 150), 150);
    }

    #[test]
    fn headline_library_mass() {
        let mass = total_mass_kg(&TspQuery::standard(62));
        assert!(rel_err(mass, 6.37e67) < 0.02, "mass = {mass:e}");
    }

    #[test]
    fn mass_of_tiny_instance_is_exactly_computable() {
        // 1 city: 1 path, 2 copies, 150 bases: mass follows directly.
        let q = TspQuery {
            n: 1,
            seg_len: 150,
            copies: 2,
            mass_per_bp: 660.0,
        };
        let expected = 2.0 * 150.0 * 660.0 / AVOGADRO / 1000.0;
        assert_eq!(total_mass_kg(&q), expected);
    }

    #[test]
    fn strands_required_triangle() {
        assert_eq!(strands_required(1), 2);
        assert_eq!(strands_required(10), 65);
        assert_eq!(strands_required(62), 2015);
    }

    #[test]
    fn capacity_and_minimum_length() {
        assert_eq!(unique_capacity(1), BigUint::from(4u32));
        assert_eq!(unique_capacity(0), BigUint::one());
        assert_eq!(min_length_for(&BigUint::from(2015u32)), 6);
        assert_eq!(min_length_for(&unique_capacity(10)), 10);
        assert_eq!(min_length_for(&BigUint::one()), 0);
    }

    #[test]
    fn comparison_table_values() {
        let rows = comparison_report();
        let dna = &rows[0];
        let si = &rows[1];
        assert_eq!(dna.nm3_per_bit, 1.0);
        assert_eq!(dna.ops_per_second, (1e14, 1e20));
        assert_eq!(dna.ops_per_joule, 2e19);
        assert_eq!(dna.joules_per_op, Some(5e-20));
        assert_eq!(si.nm3_per_bit, 1e12);
        assert_eq!(si.ops_per_second, (1e8, 1e12));
        assert_eq!(si.ops_per_joule, 1e9);
    }

    #[test]
    fn report_headline_values() {
        let r = report(&TspQuery::standard(62));
        assert_eq!(r.strand_bp, 18_450);
        assert_eq!(r.strands_required, 2015);
        assert_eq!(r.capacity_bound_bp, 6);
        assert!(r.paths.starts_with("31469"), "62! = {}", r.paths);
    }

    proptest! {
        #[test]
        fn factorial_recurrence(n in 1u64..100) {
            prop_assert_eq!(path_count(n), path_count(n - 1) * n);
        }

        #[test]
        fn mass_monotone_in_n(n in 1u64..100) {
            let lo = total_mass_kg(&TspQuery::standard(n));
            let hi = total_mass_kg(&TspQuery::standard(n + 1));
            prop_assert!(hi > lo);
        }

        #[test]
        fn capacity_bound_is_tight(k in 1u64..1_000_000) {
            let k = BigUint::from(k);
            let len = min_length_for(&k);
            prop_assert!(unique_capacity(len) >= k.clone());
            if len > 0 {
                prop_assert!(unique_capacity(len - 1) < k);
            }
        }
    }
}
