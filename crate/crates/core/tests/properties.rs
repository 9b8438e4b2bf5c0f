use std::collections::BTreeSet;

use proptest::prelude::*;

use nodeloc::cut::{min_vertex_cut_size, min_vertex_cut_witness, two_connected};
use nodeloc::identifiability::{csp_internals, greedy_set_cover, omega_cap, omega_csp};
use nodeloc::oracle::{brute_vertex_cut, oracle_msc, oracle_omega, oracle_omega_all, OracleLimits};
use nodeloc::paths::{enumerate_cap, enumerate_csp, route_up};
use nodeloc::{AnalysisOptions, Analyzer, EnumLimits, ExactCcdfTable, Graph, Mechanism, Topology};

const LIMITS: EnumLimits = EnumLimits {
    max_nodes: 14,
    max_edges: 45,
};

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .enumerate()
        .filter(|&(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    Graph::from_index_edges(n, edges).unwrap()
}

fn any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<u64>()).prop_map(|(n, mask)| graph_from_mask(n, mask))
}

/// Connected topologies with at least one non-monitor: a random spanning tree
/// joined with a random edge mask.
fn topology(max_n: usize) -> impl Strategy<Value = Topology> {
    (3..=max_n, any::<u64>(), any::<u64>(), any::<u64>()).prop_map(|(n, mask, tree, pick)| {
        let extra = graph_from_mask(n, mask);
        let parents = (1..n).map(|v| ((tree >> (3 * v)) as usize % v, v));
        let edges: BTreeSet<(usize, usize)> = extra.edges().chain(parents).collect();
        let g = Graph::from_index_edges(n, edges).unwrap();
        let mu = 1 + (pick as usize % (n - 1));
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left((pick >> 8) as usize % n);
        Topology::new(g, &order[..mu]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn flow_cut_matches_brute_force(g in any_graph(8), s in 0usize..8, t in 0usize..8) {
        let n = g.node_count();
        let (s, t) = (s % n, t % n);
        prop_assume!(s != t);
        let cut = min_vertex_cut_size(&g, s, t).unwrap().cut_size;
        prop_assert_eq!(cut, brute_vertex_cut(&g, s, t, 8).unwrap());
        prop_assert_eq!(two_connected(&g, s, t).unwrap(), cut >= 2);
        if let Some(witness) = min_vertex_cut_witness(&g, s, t).unwrap() {
            prop_assert_eq!(witness.len(), cut);
            let kept: Vec<(usize, usize)> = g
                .edges()
                .filter(|&(a, b)| !witness.contains(&a) && !witness.contains(&b))
                .collect();
            let rest = Graph::from_index_edges(n, kept).unwrap();
            prop_assert_eq!(brute_vertex_cut(&rest, s, t, 8).unwrap(), 0);
        }
    }

    #[test]
    fn walk_index_is_exact(t in topology(7)) {
        let paths = enumerate_cap(&t, LIMITS).unwrap();
        let omega = oracle_omega_all(&t, &paths, OracleLimits::default()).unwrap();
        for (&v, &o) in t.non_monitors().iter().zip(&omega) {
            let b = omega_cap(&t, v).unwrap().bounds;
            prop_assert!(b.is_exact() && b.lo == o, "{}: {} vs {}", t.name(v), b, o);
        }
    }

    #[test]
    fn simple_path_bounds_contain_exact(t in topology(7)) {
        let paths = enumerate_csp(&t, LIMITS).unwrap();
        let omega = oracle_omega_all(&t, &paths, OracleLimits::default()).unwrap();
        for (&v, &o) in t.non_monitors().iter().zip(&omega) {
            prop_assert!(omega_csp(&t, v).unwrap().bounds.contains(o));
            let c = csp_internals(&t, v).unwrap();
            prop_assert!(c.delta_min <= c.delta_star);
        }
    }

    #[test]
    fn cover_sandwich(t in topology(8)) {
        let paths = route_up(&t);
        let lim = OracleLimits::default();
        let omega = oracle_omega_all(&t, &paths, lim).unwrap();
        for (&v, &o) in t.non_monitors().iter().zip(&omega) {
            let msc = oracle_msc(&t, v, &paths, lim).unwrap();
            prop_assert!(msc.saturating_sub(1) <= o && o <= msc);
            prop_assert!(greedy_set_cover(&t, v, &paths).unwrap() >= msc);
        }
    }

    #[test]
    fn set_index_is_member_minimum(t in topology(7), pick in any::<u64>()) {
        let set: Vec<usize> = t
            .non_monitors()
            .iter()
            .enumerate()
            .filter(|&(i, _)| pick >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        prop_assume!(!set.is_empty());
        let paths = enumerate_csp(&t, LIMITS).unwrap();
        let lim = OracleLimits::default();
        let exact = oracle_omega(&t, &paths, &set, lim).unwrap();
        let min = set.iter().map(|&v| oracle_omega(&t, &paths, &[v], lim).unwrap()).min().unwrap();
        prop_assert_eq!(exact, min);
        let a = Analyzer::new(&t, Mechanism::Csp, None, AnalysisOptions::exact()).unwrap();
        let b = a.omega_set(&set).unwrap();
        prop_assert!(b.is_exact() && b.lo == exact);
    }

    #[test]
    fn mechanisms_are_ordered(t in topology(7)) {
        let lim = OracleLimits::default();
        let up = oracle_omega_all(&t, &route_up(&t), lim).unwrap();
        let csp = oracle_omega_all(&t, &enumerate_csp(&t, LIMITS).unwrap(), lim).unwrap();
        let cap = oracle_omega_all(&t, &enumerate_cap(&t, LIMITS).unwrap(), lim).unwrap();
        for i in 0..t.sigma() {
            prop_assert!(up[i] <= csp[i] && csp[i] <= cap[i]);
        }
    }

    #[test]
    fn ccdf_is_non_increasing(t in topology(9)) {
        let analyses: Vec<Analyzer> = Mechanism::ALL
            .iter()
            .map(|&m| Analyzer::new(&t, m, None, AnalysisOptions::default()).unwrap())
            .collect();
        let table = ExactCcdfTable::from_analyses(&analyses).unwrap();
        prop_assert!(table.is_well_formed());
        for a in &analyses {
            for k in 1..=t.sigma() {
                let s = a.max_identifiable_set(k).unwrap();
                prop_assert!(s.inner.iter().all(|v| s.outer.contains(v)));
            }
        }
    }

    #[test]
    fn edge_list_text_reloads(t in topology(9)) {
        let again = Topology::load(&t.to_edge_list(), None).unwrap();
        prop_assert_eq!(again.graph().edges().collect::<Vec<_>>(), t.graph().edges().collect::<Vec<_>>());
        prop_assert_eq!(again.monitors(), t.monitors());
    }
}
