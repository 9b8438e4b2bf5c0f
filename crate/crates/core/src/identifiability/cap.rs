use crate::cut::gamma;
use crate::error::Result;
use crate::graph::{build_star, AuxiliaryGraph, Topology};

use super::{check_k, IntBounds, Omega, Rule, TriState};

pub(crate) fn star_cut(star: &AuxiliaryGraph, v: usize) -> Result<usize> {
    let node = star.node_of(v).expect("non-monitor kept in star graph");
    gamma(star.graph(), &[node], star.virtual_monitor())
}

/// Ω of a single non-monitor under arbitrary walks; always exact.
pub fn omega_cap(t: &Topology, v: usize) -> Result<Omega> {
    t.require_non_monitor(v)?;
    let star = build_star(t);
    Ok(Omega::new(IntBounds::exact(star_cut(&star, v)?), Rule::StarCut))
}

/// Decides k-identifiability of `set` under arbitrary walks.
pub fn k_identifiable_cap(t: &Topology, set: &[usize], k: usize) -> Result<TriState> {
    t.require_non_monitor_set(set)?;
    check_k(k, t.sigma())?;
    let star = build_star(t);
    let nodes: Vec<usize> = set.iter().map(|&v| star.node_of(v).expect("kept")).collect();
    let cut = gamma(star.graph(), &nodes, star.virtual_monitor())?;
    Ok(TriState::from_bool(cut >= k, Rule::StarCut))
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
    fn monitor_neighbors_are_fully_identifiable() {
        let t = Topology::load(SAMPLE, None).unwrap();
        for &v in t.non_monitors() {
            assert_eq!(omega_cap(&t, v).unwrap().bounds, IntBounds::exact(4));
        }
        let all = t.non_monitors().to_vec();
        assert_eq!(
            k_identifiable_cap(&t, &all, 4).unwrap(),
            TriState::Identifiable(Rule::StarCut)
        );
    }

    #[test]
    fn chain_interior() {
        // m1 - a - b - c - m2 with d hanging off b
        let t = Topology::load("# monitors: m1 m2\nm1 a\na b\nb c\nc m2\nb d\n", None).unwrap();
        let id = |n: &str| t.index_of(n).unwrap();
        assert_eq!(omega_cap(&t, id("b")).unwrap().bounds, IntBounds::exact(2));
        assert_eq!(omega_cap(&t, id("d")).unwrap().bounds, IntBounds::exact(1));
        assert_eq!(omega_cap(&t, id("a")).unwrap().bounds, IntBounds::exact(4));
        assert!(matches!(
            k_identifiable_cap(&t, &[id("b"), id("d")], 2).unwrap(),
            TriState::NotIdentifiable(_)
        ));
        assert!(k_identifiable_cap(&t, &[id("m1")], 1).is_err());
        assert!(k_identifiable_cap(&t, &[id("b")], 5).is_err());
    }
}
