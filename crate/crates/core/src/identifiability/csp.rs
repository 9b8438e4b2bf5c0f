use serde::Serialize;

use crate::cut::gamma;
use crate::error::Result;
use crate::graph::{build_minus_monitor, build_star, AuxiliaryGraph, Topology};

use super::cap::star_cut;
use super::{check_k, IntBounds, Omega, Rule, TriState};

/// Cut quantities behind the simple-path bounds for one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CspInternals {
    /// Cut to the virtual monitor in the star graph.
    pub delta_star: usize,
    /// Smallest cut to the virtual monitor over the per-monitor graphs.
    pub delta_min: usize,
    /// `min(delta_min, delta_star - 1)`.
    pub pi: usize,
    pub monitor_degree: usize,
}

/// Star graph and one minus-monitor graph per monitor, built once.
pub(crate) struct CspGraphs {
    star: AuxiliaryGraph,
    minus: Vec<AuxiliaryGraph>,
}

impl CspGraphs {
    pub(crate) fn new(t: &Topology) -> CspGraphs {
        CspGraphs {
            star: build_star(t),
            minus: t
                .monitors()
                .iter()
                .map(|&m| build_minus_monitor(t, m).expect("monitor"))
                .collect(),
        }
    }

    pub(crate) fn internals(&self, t: &Topology, v: usize) -> Result<CspInternals> {
        let delta_star = star_cut(&self.star, v)?;
        let mut delta_min = usize::MAX;
        for gm in &self.minus {
            let node = gm.node_of(v).expect("non-monitor kept");
            delta_min = delta_min.min(gamma(gm.graph(), &[node], gm.virtual_monitor())?);
        }
        Ok(CspInternals {
            delta_star,
            delta_min,
            pi: delta_min.min(delta_star.saturating_sub(1)),
            monitor_degree: t.monitor_degree(v),
        })
    }
}

/// Whether every node of `set` has at least two monitor neighbors.
fn all_two_monitor_neighbors(t: &Topology, set: &[usize]) -> bool {
    set.iter().all(|&v| t.monitor_degree(v) >= 2)
}

/// Exception under which `set` is (σ-1)-identifiable without every node having
/// two monitor neighbors: the only deficient node `v` lies in `set`, touches
/// every other non-monitor and at least one monitor.
fn sigma_minus_one_holds(t: &Topology, set: &[usize]) -> bool {
    let deficient: Vec<usize> = t
        .non_monitors()
        .iter()
        .copied()
        .filter(|&v| t.monitor_degree(v) < 2)
        .collect();
    match deficient.as_slice() {
        [] => true,
        [v] if !set.contains(v) => true,
        [v] => {
            t.monitor_degree(*v) >= 1
                && t
                    .non_monitors()
                    .iter()
                    .all(|&w| w == *v || t.graph().has_edge(*v, w))
        }
        _ => all_two_monitor_neighbors(t, set),
    }
}

pub(crate) fn omega_from_internals(t: &Topology, v: usize, c: &CspInternals) -> Omega {
    let sigma = t.sigma();
    if c.monitor_degree >= 2 {
        return Omega::new(IntBounds::exact(sigma), Rule::TwoMonitorNeighbors);
    }
    if c.delta_star <= 1 {
        return Omega::new(IntBounds::exact(0), Rule::SingleCut);
    }
    if c.delta_min == sigma && c.delta_star == sigma {
        return Omega::new(IntBounds::exact(sigma), Rule::TwoMonitorNeighbors);
    }
    if c.delta_star == sigma && c.delta_min + 1 == sigma {
        let value = if sigma_minus_one_holds(t, &[v]) {
            sigma - 1
        } else {
            sigma.saturating_sub(2)
        };
        return Omega::new(IntBounds::exact(value), Rule::SigmaMinusOne);
    }
    Omega::new(
        IntBounds::new(c.pi.saturating_sub(1), c.pi.min(sigma)),
        Rule::CutGap,
    )
}

/// Cut quantities for `v` under simple-path probing.
pub fn csp_internals(t: &Topology, v: usize) -> Result<CspInternals> {
    t.require_non_monitor(v)?;
    CspGraphs::new(t).internals(t, v)
}

/// Bounds on Ω of a single non-monitor under simple-path probing.
pub fn omega_csp(t: &Topology, v: usize) -> Result<Omega> {
    let c = csp_internals(t, v)?;
    Ok(omega_from_internals(t, v, &c))
}

pub(crate) fn k_identifiable_from(
    t: &Topology,
    set: &[usize],
    k: usize,
    internals: &[CspInternals],
) -> TriState {
    let sigma = t.sigma();
    if all_two_monitor_neighbors(t, set) {
        return TriState::Identifiable(Rule::TwoMonitorNeighbors);
    }
    if k == sigma {
        return TriState::NotIdentifiable(Rule::TwoMonitorNeighbors);
    }
    if k + 1 == sigma {
        return TriState::from_bool(sigma_minus_one_holds(t, set), Rule::SigmaMinusOne);
    }
    let star = internals.iter().map(|c| c.delta_star).min().expect("non-empty");
    let minus = internals.iter().map(|c| c.delta_min).min().expect("non-empty");
    if star >= k + 2 && minus > k {
        TriState::Identifiable(Rule::CutSufficient)
    } else if star < k + 1 || minus < k {
        TriState::NotIdentifiable(Rule::CutNecessary)
    } else {
        TriState::Undetermined(Rule::CutGap)
    }
}

/// Decides k-identifiability of `set` under simple-path probing. The answer may
/// be [`TriState::Undetermined`] when the cut thresholds leave a gap.
pub fn k_identifiable_csp(t: &Topology, set: &[usize], k: usize) -> Result<TriState> {
    t.require_non_monitor_set(set)?;
    check_k(k, t.sigma())?;
    let graphs = CspGraphs::new(t);
    let internals = set
        .iter()
        .map(|&v| graphs.internals(t, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(k_identifiable_from(t, set, k, &internals))
}

/// Maximal σ-identifiable set: nodes with two or more monitor neighbors.
pub fn sigma_set_csp(t: &Topology) -> Vec<usize> {
    t.non_monitors()
        .iter()
        .copied()
        .filter(|&v| t.monitor_degree(v) >= 2)
        .collect()
}

/// Maximal (σ-1)-identifiable set.
pub fn sigma_minus_one_set_csp(t: &Topology) -> Vec<usize> {
    let mut set = sigma_set_csp(t);
    let deficient: Vec<usize> = t
        .non_monitors()
        .iter()
        .copied()
        .filter(|&v| t.monitor_degree(v) < 2)
        .collect();
    if let [v] = deficient.as_slice() {
        if sigma_minus_one_holds(t, &[*v]) {
            set.push(*v);
            set.sort_unstable();
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# monitors: m1 m2 m3
m1 v1
m1 v2
m2 v1
m2 v3
m2 v4
m3 v3
m3 v4
v1 v2
v2 v3
v2 v4
";

    fn sample() -> Topology {
        Topology::load(SAMPLE, None).unwrap()
    }

    #[test]
    fn sample_values() {
        let t = sample();
        let id = |n: &str| t.index_of(n).unwrap();
        for n in ["v1", "v3", "v4"] {
            let o = omega_csp(&t, id(n)).unwrap();
            assert_eq!(o.bounds, IntBounds::exact(4), "{n}");
        }
        let c = csp_internals(&t, id("v2")).unwrap();
        assert_eq!((c.delta_star, c.delta_min), (4, 3));
        assert_eq!(omega_csp(&t, id("v2")).unwrap().bounds, IntBounds::exact(3));
        assert_eq!(sigma_set_csp(&t), [id("v1"), id("v3"), id("v4")]);
        assert_eq!(sigma_minus_one_set_csp(&t), t.non_monitors());
    }

    #[test]
    fn sample_set_queries() {
        let t = sample();
        let all = t.non_monitors().to_vec();
        assert_eq!(
            k_identifiable_csp(&t, &all, 3).unwrap(),
            TriState::Identifiable(Rule::SigmaMinusOne)
        );
        assert_eq!(
            k_identifiable_csp(&t, &all, 4).unwrap(),
            TriState::NotIdentifiable(Rule::TwoMonitorNeighbors)
        );
    }

    #[test]
    fn chain_is_zero() {
        let t = Topology::load("# monitors: m1 m2\nm1 v1\nv1 v2\nv2 m2\n", None).unwrap();
        for &v in t.non_monitors() {
            let o = omega_csp(&t, v).unwrap();
            assert_eq!(o.bounds, IntBounds::exact(0));
        }
    }
}
