//! Identifiability of node failures under the three probing mechanisms.
//!
//! Per-node values are reported as integer bounds on Ω, the largest `k` for
//! which a node is k-identifiable. Set-level answers are tri-state and carry
//! the rule that decided them.

mod analyzer;
mod cap;
mod csp;
mod one;
mod up;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use analyzer::{AnalysisOptions, Analyzer, NodeResult};
pub use cap::{k_identifiable_cap, omega_cap};
pub use csp::{
    csp_internals, k_identifiable_csp, omega_csp, sigma_minus_one_set_csp, sigma_set_csp,
    CspInternals,
};
pub use one::one_identifiable;
pub use up::{direct_path_set, greedy_set_cover, k_identifiable_up, omega_up, omega_from_cover};

/// Probing mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    /// Arbitrary walks between monitors.
    Cap,
    /// Simple paths between distinct monitors.
    Csp,
    /// One fixed route per monitor pair.
    Up,
}

impl Mechanism {
    pub const ALL: [Mechanism; 3] = [Mechanism::Cap, Mechanism::Csp, Mechanism::Up];

    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Cap => "cap",
            Mechanism::Csp => "csp",
            Mechanism::Up => "up",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cap" => Ok(Mechanism::Cap),
            "csp" => Ok(Mechanism::Csp),
            "up" => Ok(Mechanism::Up),
            _ => Err(Error::InvalidParameter(format!("unknown mechanism `{s}`"))),
        }
    }
}

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntBounds {
    pub lo: usize,
    pub hi: usize,
}

impl IntBounds {
    pub fn new(lo: usize, hi: usize) -> IntBounds {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        IntBounds { lo, hi }
    }

    pub fn exact(value: usize) -> IntBounds {
        IntBounds { lo: value, hi: value }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, value: usize) -> bool {
        self.lo <= value && value <= self.hi
    }

    /// Intersection, or `None` when the intervals are disjoint.
    pub fn intersect(&self, other: IntBounds) -> Option<IntBounds> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(IntBounds { lo, hi })
    }
}

impl fmt::Display for IntBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

impl Serialize for IntBounds {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("IntBounds", 3)?;
        s.serialize_field("lo", &self.lo)?;
        s.serialize_field("hi", &self.hi)?;
        s.serialize_field("exact", &self.is_exact())?;
        s.end()
    }
}

/// Per-node estimate together with the rule that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Omega {
    pub bounds: IntBounds,
    pub rule: Rule,
}

impl Omega {
    pub(crate) fn new(bounds: IntBounds, rule: Rule) -> Omega {
        Omega { bounds, rule }
    }
}

/// Rule that decided a bound or a tri-state answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Exact vertex cut to the virtual monitor on the star graph.
    StarCut,
    /// Node has at least two monitor neighbors.
    TwoMonitorNeighbors,
    /// Near-complete identifiability exception with one monitor neighbor.
    SigmaMinusOne,
    /// Star cut of one: the node is not even 1-identifiable.
    SingleCut,
    /// Cut thresholds on the star and per-monitor graphs are met.
    CutSufficient,
    /// Cut thresholds on the star and per-monitor graphs fail.
    CutNecessary,
    /// Between the sufficient and necessary cut thresholds.
    CutGap,
    /// No measurement path traverses the node.
    Unmonitored,
    /// A measurement path traverses only this non-monitor.
    DirectPath,
    /// Path-cover thresholds are met.
    CoverSufficient,
    /// Path-cover thresholds fail.
    CoverNecessary,
    /// Between the sufficient and necessary cover thresholds.
    CoverGap,
    /// Exact minimum path cover.
    ExactCover,
    /// Dedicated 1-identifiability test.
    OneIdentifiability,
    /// Intersection of all available per-node bounds.
    RefinedBounds,
    /// Exhaustive enumeration of failure sets.
    Oracle,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::StarCut => "star-cut",
            Rule::TwoMonitorNeighbors => "two-monitor-neighbors",
            Rule::SigmaMinusOne => "sigma-minus-one",
            Rule::SingleCut => "single-cut",
            Rule::CutSufficient => "cut-sufficient",
            Rule::CutNecessary => "cut-necessary",
            Rule::CutGap => "cut-gap",
            Rule::Unmonitored => "unmonitored",
            Rule::DirectPath => "direct-path",
            Rule::CoverSufficient => "cover-sufficient",
            Rule::CoverNecessary => "cover-necessary",
            Rule::CoverGap => "cover-gap",
            Rule::ExactCover => "exact-cover",
            Rule::OneIdentifiability => "one-identifiability",
            Rule::RefinedBounds => "refined-bounds",
            Rule::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Answer to "is this set k-identifiable?".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriState {
    Identifiable(Rule),
    NotIdentifiable(Rule),
    Undetermined(Rule),
}

impl TriState {
    pub fn rule(&self) -> Rule {
        match *self {
            TriState::Identifiable(r) | TriState::NotIdentifiable(r) | TriState::Undetermined(r) => r,
        }
    }

    /// `Some(answer)` unless undetermined.
    pub fn decided(&self) -> Option<bool> {
        match self {
            TriState::Identifiable(_) => Some(true),
            TriState::NotIdentifiable(_) => Some(false),
            TriState::Undetermined(_) => None,
        }
    }

    pub(crate) fn from_bool(value: bool, rule: Rule) -> TriState {
        if value {
            TriState::Identifiable(rule)
        } else {
            TriState::NotIdentifiable(rule)
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TriState::Identifiable(_) => "identifiable",
            TriState::NotIdentifiable(_) => "not-identifiable",
            TriState::Undetermined(_) => "undetermined",
        }
    }
}

impl Serialize for TriState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("TriState", 2)?;
        st.serialize_field("answer", self.label())?;
        st.serialize_field("rule", &self.rule())?;
        st.end()
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.label(), self.rule())
    }
}

/// Inner and outer bounds on the maximal k-identifiable set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetBounds {
    /// Nodes certainly k-identifiable.
    pub inner: Vec<usize>,
    /// Nodes possibly k-identifiable; a superset of `inner`.
    pub outer: Vec<usize>,
}

impl SetBounds {
    pub fn is_exact(&self) -> bool {
        self.inner == self.outer
    }
}

pub(crate) fn check_k(k: usize, sigma: usize) -> Result<()> {
    if k == 0 || k > sigma {
        return Err(Error::KOutOfRange { k, sigma });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_ops() {
        let b = IntBounds::new(1, 3);
        assert!(!b.is_exact() && b.contains(2) && !b.contains(4));
        assert_eq!(b.intersect(IntBounds::new(2, 5)), Some(IntBounds::new(2, 3)));
        assert_eq!(b.intersect(IntBounds::exact(4)), None);
        assert_eq!(IntBounds::exact(2).to_string(), "2");
        assert_eq!(b.to_string(), "[1, 3]");
        assert_eq!(
            serde_json::to_string(&b).unwrap(),
            r#"{"lo":1,"hi":3,"exact":false}"#
        );
    }

    #[test]
    fn mechanism_parse() {
        assert_eq!("CSP".parse::<Mechanism>().unwrap(), Mechanism::Csp);
        assert!("xyz".parse::<Mechanism>().is_err());
    }

    #[test]
    fn tristate_display() {
        let t = TriState::Undetermined(Rule::CutGap);
        assert_eq!(t.to_string(), "undetermined (cut-gap)");
        assert_eq!(t.decided(), None);
    }
}
