use crate::cut::{two_connected_with, Biconnected};
use crate::error::{Error, Result};
use crate::graph::{build_extended, build_extended_minus, AuxiliaryGraph, Topology};
use crate::paths::PathSet;

use super::Mechanism;

/// Per-node 1-identifiability under simple-path probing, indexed by
/// non-monitor position.
pub(crate) fn one_identifiable_csp_all(t: &Topology) -> Vec<bool> {
    let ext = build_extended(t);
    let ext_bcc = Biconnected::new(ext.graph());
    let minus: Vec<(AuxiliaryGraph, Biconnected)> = t
        .non_monitors()
        .iter()
        .map(|&w| {
            let g = build_extended_minus(t, w).expect("non-monitor");
            let b = Biconnected::new(g.graph());
            (g, b)
        })
        .collect();
    let reaches = |aux: &AuxiliaryGraph, bcc: &Biconnected, v: usize| {
        let node = aux.node_of(v).expect("kept");
        two_connected_with(aux.graph(), bcc, node, aux.virtual_monitor())
    };
    t.non_monitors()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            reaches(&ext, &ext_bcc, v)
                && t.non_monitors().iter().enumerate().all(|(j, &w)| {
                    w == v || {
                        let (gw, bw) = &minus[j];
                        let (gv, bv) = &minus[i];
                        reaches(gw, bw, v) || reaches(gv, bv, w)
                    }
                })
        })
        .collect()
}

/// Per-node 1-identifiability for an explicit path set, indexed by
/// non-monitor position: each node lies on some path and no other node lies
/// on exactly the same paths.
pub(crate) fn one_identifiable_paths_all(t: &Topology, paths: &PathSet) -> Vec<bool> {
    t.non_monitors()
        .iter()
        .map(|&v| {
            let pv = paths.through(v);
            !pv.is_clear()
                && t
                    .non_monitors()
                    .iter()
                    .all(|&w| w == v || paths.through(w) != pv)
        })
        .collect()
}

/// Exact 1-identifiability of `set`. Fixed routing needs its path set.
pub fn one_identifiable(
    t: &Topology,
    set: &[usize],
    mechanism: Mechanism,
    paths: Option<&PathSet>,
) -> Result<bool> {
    t.require_non_monitor_set(set)?;
    let per_node = match mechanism {
        Mechanism::Cap => return Ok(t.mu() >= 1),
        Mechanism::Csp => one_identifiable_csp_all(t),
        Mechanism::Up => one_identifiable_paths_all(t, paths.ok_or(Error::MissingPaths)?),
    };
    Ok(set
        .iter()
        .all(|&v| per_node[t.position(v).expect("validated")]))
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

    #[test]
    fn sample_fixed_routing() {
        let t = Topology::load(SAMPLE, None).unwrap();
        let ps = PathSet::parse(&t, "m1 v1 m2\nm2 v4 m3\nm1 v2 v4 m3\n").unwrap();
        let s = t.non_monitor_set(&["v1", "v2", "v4"]).unwrap();
        assert!(one_identifiable(&t, &s, Mechanism::Up, Some(&ps)).unwrap());
        let v3 = t.non_monitor_set(&["v3"]).unwrap();
        assert!(!one_identifiable(&t, &v3, Mechanism::Up, Some(&ps)).unwrap());
        assert_eq!(
            one_identifiable(&t, &s, Mechanism::Up, None),
            Err(Error::MissingPaths)
        );
    }

    #[test]
    fn simple_paths() {
        let t = Topology::load(SAMPLE, None).unwrap();
        let all = t.non_monitors().to_vec();
        assert!(one_identifiable(&t, &all, Mechanism::Csp, None).unwrap());
        let chain = Topology::load("# monitors: m1 m2\nm1 v1\nv1 v2\nv2 m2\n", None).unwrap();
        let all = chain.non_monitors().to_vec();
        assert!(!one_identifiable(&chain, &all, Mechanism::Csp, None).unwrap());
        assert!(one_identifiable(&chain, &all, Mechanism::Cap, None).unwrap());
    }
}
