//! strandbench: a desk-scale DNA computing workbench.
//!
//! Faithful, testable models of four molecular-computation idioms:
//! sequence library design, exhaustive strand-based path search,
//! algorithmic tile self-assembly, and toehold-mediated strand
//! displacement, plus the scaling arithmetic that bounds them.

pub mod adleman;
pub mod circuit;
pub mod dsd;
pub mod feasibility;
pub mod seq;
pub mod tiling;
