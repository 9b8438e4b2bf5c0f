//! Node failure localization from binary path measurements.
//!
//! Given a network with monitors and a probing mechanism, the crate computes
//! how many simultaneous node failures can be uniquely localized: per-node
//! bounds on the maximum identifiability index Ω, tri-state k-identifiability
//! answers, and inner/outer bounds on the maximal k-identifiable set. Small
//! instances can be checked against exhaustive oracles.

pub mod cut;
pub mod error;
pub mod eval;
pub mod graph;
pub mod identifiability;
pub mod oracle;
pub mod paths;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{AuxKind, AuxiliaryGraph, Graph, Topology, VIRTUAL_MONITOR};
pub use identifiability::{AnalysisOptions, Analyzer, IntBounds, Mechanism, Rule, SetBounds, TriState};
pub use paths::{EnumLimits, Path, PathSet};

/// CCDF table with floating-point fractions.
pub type CcdfTable = eval::CcdfTableOf<f64>;
/// CCDF table with exact rational fractions.
pub type ExactCcdfTable = eval::CcdfTableOf<num_rational::Ratio<u64>>;
