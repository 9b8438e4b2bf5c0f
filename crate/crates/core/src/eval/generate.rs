//! Seeded random topologies.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Topology};

pub const DEFAULT_MAX_RETRIES: usize = 1000;

/// Connected Erdős–Rényi sample and the number of rejected draws before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErGraph {
    pub graph: Graph,
    pub retries: usize,
}

/// Includes each of the `n(n-1)/2` pairs independently with probability `p`,
/// redrawing until the graph is connected. Nodes are named `n00`, `n01`, ...
pub fn gen_er(n: usize, p: f64, seed: u64, max_retries: usize) -> Result<ErGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < p <= 1, got {p}")));
    }
    let width = (n - 1).to_string().len().max(2);
    let names: Vec<String> = (0..n).map(|i| format!("n{i:0width$}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for retries in 0..=max_retries {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        let graph = Graph::with_names(names.clone(), edges)?;
        if graph.is_connected() {
            return Ok(ErGraph { graph, retries });
        }
    }
    Err(Error::RetryLimit(max_retries))
}

/// Chooses `mu` monitors uniformly at random. For a fixed seed the placements
/// are nested: the monitors for `mu` are a subset of those for `mu + 1`.
pub fn place_monitors(graph: &Graph, mu: usize, seed: u64) -> Result<Topology> {
    if mu == 0 || mu > graph.node_count() {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= mu <= {}, got {mu}",
            graph.node_count()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.shuffle(&mut rng);
    Topology::new(graph.clone(), &order[..mu])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_connected() {
        let a = gen_er(12, 0.3, 7, DEFAULT_MAX_RETRIES).unwrap();
        let b = gen_er(12, 0.3, 7, DEFAULT_MAX_RETRIES).unwrap();
        assert_eq!(a, b);
        assert!(a.graph.is_connected());
        assert_eq!(a.graph.name(0), "n00");
    }

    #[test]
    fn trivial_and_invalid() {
        let g = gen_er(2, 1.0, 0, 0).unwrap().graph;
        assert_eq!(g.edge_count(), 1);
        assert!(gen_er(1, 0.5, 0, 10).is_err());
        assert!(gen_er(5, 0.0, 0, 10).is_err());
        assert_eq!(gen_er(30, 0.001, 0, 3), Err(Error::RetryLimit(3)));
    }

    #[test]
    fn mean_edge_count_matches_density() {
        let p = 51.0 / 190.0;
        let total: usize = (0..200)
            .map(|s| gen_er(20, p, s, DEFAULT_MAX_RETRIES).unwrap().graph.edge_count())
            .sum();
        let mean = total as f64 / 200.0;
        assert!((mean - 51.0).abs() < 2.5, "mean {mean}");
    }

    #[test]
    fn monitor_placement() {
        let g = gen_er(10, 0.5, 3, DEFAULT_MAX_RETRIES).unwrap().graph;
        let t2 = place_monitors(&g, 2, 9).unwrap();
        let t5 = place_monitors(&g, 5, 9).unwrap();
        assert_eq!(t2, place_monitors(&g, 2, 9).unwrap());
        assert!(t2.monitors().iter().all(|m| t5.monitors().contains(m)));
        let all = place_monitors(&g, 10, 1).unwrap();
        assert_eq!(all.sigma(), 0);
        assert!(place_monitors(&g, 0, 1).is_err());
        assert!(place_monitors(&g, 11, 1).is_err());
    }
}
