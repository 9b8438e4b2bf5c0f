//! Exhaustive reference implementations used to validate the theory-based
//! analysis on small instances.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Topology};
use crate::paths::PathSet;

/// Largest non-monitor count the exhaustive searches accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleLimits {
    pub max_sigma: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_sigma: 10 }
    }
}

impl OracleLimits {
    fn check(&self, t: &Topology) -> Result<()> {
        if t.sigma() > self.max_sigma.min(63) {
            return Err(Error::OracleCap {
                sigma: t.sigma(),
                max_sigma: self.max_sigma.min(63),
            });
        }
        Ok(())
    }
}

/// Validated set of failed non-monitors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FailureSet(Vec<usize>);

impl FailureSet {
    pub fn new(t: &Topology, mut nodes: Vec<usize>) -> Result<FailureSet> {
        nodes.iter().try_for_each(|&v| t.require_non_monitor(v))?;
        nodes.sort_unstable();
        nodes.dedup();
        Ok(FailureSet(nodes))
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }
}

/// Whether the two failure sets fail different sets of paths.
pub fn distinguishable(t: &Topology, paths: &PathSet, a: &FailureSet, b: &FailureSet) -> bool {
    let pa = paths.affected(t, a.nodes()).expect("validated failure set");
    let pb = paths.affected(t, b.nodes()).expect("validated failure set");
    pa != pb
}

/// Distinct non-empty traces as masks over non-monitor positions.
fn trace_masks(t: &Topology, paths: &PathSet) -> Vec<u64> {
    let mut masks: Vec<u64> = paths
        .paths()
        .iter()
        .map(|p| {
            p.trace()
                .iter()
                .filter_map(|&v| t.position(v))
                .fold(0u64, |m, i| m | 1 << i)
        })
        .filter(|&m| m != 0)
        .collect();
    masks.sort_unstable();
    masks.dedup();
    masks
}

/// Calls `f` for every `k`-subset of `n` bits.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > n {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << n;
    let mut x = (1u64 << k) - 1;
    while x < limit {
        f(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
}

/// `levels[k]` is the mask of non-monitor positions that belong to the
/// symmetric difference of two indistinguishable failure sets of size at most
/// `k`. Levels stop early once every position is covered.
fn confusable_levels(t: &Topology, paths: &PathSet, max_k: usize) -> Vec<u64> {
    let sigma = t.sigma();
    let traces = trace_masks(t, paths);
    let words = traces.len().div_ceil(64).max(1);
    let full = if sigma == 64 { u64::MAX } else { (1u64 << sigma) - 1 };
    let mut groups: HashMap<Vec<u64>, (u64, u64)> = HashMap::new();
    let mut bad = 0u64;
    let mut levels = vec![0u64];
    let mut fp = vec![0u64; words];
    for k in 0..=max_k.min(sigma) {
        for_each_subset(sigma, k, |f| {
            fp.iter_mut().for_each(|w| *w = 0);
            for (i, &tr) in traces.iter().enumerate() {
                if tr & f != 0 {
                    fp[i / 64] |= 1 << (i % 64);
                }
            }
            let entry = groups.entry(fp.clone()).or_insert((0, u64::MAX));
            entry.0 |= f;
            entry.1 &= f;
            bad |= entry.0 & !entry.1;
        });
        if k > 0 {
            levels.push(bad);
        }
        if bad == full {
            break;
        }
    }
    levels
}

fn position_mask(t: &Topology, set: &[usize]) -> u64 {
    set.iter()
        .filter_map(|&v| t.position(v))
        .fold(0, |m, i| m | 1 << i)
}

/// Exhaustive check of k-identifiability of `set`.
pub fn oracle_k_identifiable(
    t: &Topology,
    paths: &PathSet,
    set: &[usize],
    k: usize,
    limits: OracleLimits,
) -> Result<bool> {
    t.require_non_monitor_set(set)?;
    if k == 0 || k > t.sigma() {
        return Err(Error::KOutOfRange { k, sigma: t.sigma() });
    }
    limits.check(t)?;
    let levels = confusable_levels(t, paths, k);
    let bad = levels.get(k).copied().unwrap_or(*levels.last().expect("level 0"));
    Ok(bad & position_mask(t, set) == 0)
}

/// Exact Ω for every non-monitor, indexed by non-monitor position.
pub fn oracle_omega_all(t: &Topology, paths: &PathSet, limits: OracleLimits) -> Result<Vec<usize>> {
    limits.check(t)?;
    let levels = confusable_levels(t, paths, t.sigma());
    Ok((0..t.sigma())
        .map(|i| {
            levels
                .iter()
                .skip(1)
                .position(|&bad| bad >> i & 1 == 1)
                .unwrap_or(t.sigma())
        })
        .collect())
}

/// Exact Ω of `set`: the largest `k` for which `set` is k-identifiable.
pub fn oracle_omega(t: &Topology, paths: &PathSet, set: &[usize], limits: OracleLimits) -> Result<usize> {
    t.require_non_monitor_set(set)?;
    let all = oracle_omega_all(t, paths, limits)?;
    Ok(set
        .iter()
        .filter_map(|&v| t.position(v))
        .map(|i| all[i])
        .min()
        .expect("non-empty set"))
}

/// Exact minimum number of other non-monitors whose paths cover every path
/// through `v`. Nodes with a direct path report σ and nodes on no path 0.
pub fn oracle_msc(t: &Topology, v: usize, paths: &PathSet, limits: OracleLimits) -> Result<usize> {
    t.require_non_monitor(v)?;
    limits.check(t)?;
    let target = paths.through(v);
    if target.is_clear() {
        return Ok(0);
    }
    if paths.has_direct_path(v) {
        return Ok(t.sigma());
    }
    let covers: Vec<FixedBitSet> = t
        .non_monitors()
        .iter()
        .filter(|&&w| w != v)
        .map(|&w| {
            let mut c = paths.through(w).clone();
            c.intersect_with(target);
            c
        })
        .filter(|c| !c.is_clear())
        .collect();
    for r in 1..=covers.len() {
        let mut found = false;
        for_each_subset(covers.len(), r, |mask| {
            if found {
                return;
            }
            let mut union = FixedBitSet::with_capacity(paths.len());
            for (i, c) in covers.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    union.union_with(c);
                }
            }
            found = union.is_superset(target);
        });
        if found {
            return Ok(r);
        }
    }
    unreachable!("paths through v without a direct path have other non-monitors")
}

/// Minimum vertex cut by trying every vertex subset in increasing size.
/// Adjacent pairs report `|V| - 1`.
pub fn brute_vertex_cut(g: &Graph, s: usize, t: usize, max_nodes: usize) -> Result<usize> {
    let n = g.node_count();
    if s >= n || t >= n {
        return Err(Error::UnknownNode(format!("#{}", s.max(t))));
    }
    if s == t {
        return Err(Error::SameEndpoints);
    }
    if n > max_nodes.min(63) {
        return Err(Error::InvalidParameter(format!(
            "brute-force cut limited to {max_nodes} nodes, graph has {n}"
        )));
    }
    if g.has_edge(s, t) {
        return Ok(n - 1);
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    for r in 0..=others.len() {
        let mut found = false;
        for_each_subset(others.len(), r, |mask| {
            if found {
                return;
            }
            let mut removed = vec![false; n];
            for (i, &v) in others.iter().enumerate() {
                removed[v] = mask >> i & 1 == 1;
            }
            found = !reachable(g, s, t, &removed);
        });
        if found {
            return Ok(r);
        }
    }
    unreachable!("removing every other vertex separates a non-adjacent pair")
}

fn reachable(g: &Graph, s: usize, t: usize, removed: &[bool]) -> bool {
    let mut seen = vec![false; g.node_count()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            return true;
        }
        for &w in g.neighbors(u) {
            if !seen[w] && !removed[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
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

    fn ids(t: &Topology, names: &[&str]) -> Vec<usize> {
        t.non_monitor_set(names).unwrap()
    }

    #[test]
    fn gosper_counts() {
        let mut count = 0;
        for_each_subset(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        let mut zero = Vec::new();
        for_each_subset(4, 0, |m| zero.push(m));
        assert_eq!(zero, [0]);
    }

    #[test]
    fn up_sample_values() {
        let t = Topology::load(SAMPLE, None).unwrap();
        let ps = PathSet::parse(&t, "m1 v1 m2\nm2 v4 m3\nm1 v2 v4 m3\n").unwrap();
        let lim = OracleLimits::default();
        let s = ids(&t, &["v1", "v2", "v4"]);
        assert_eq!(oracle_omega(&t, &ps, &s, lim).unwrap(), 1);
        assert!(oracle_k_identifiable(&t, &ps, &s, 1, lim).unwrap());
        assert!(!oracle_k_identifiable(&t, &ps, &s, 2, lim).unwrap());
        let v3 = ids(&t, &["v3"]);
        assert_eq!(oracle_omega(&t, &ps, &v3, lim).unwrap(), 0);
        let v2 = t.index_of("v2").unwrap();
        assert_eq!(oracle_msc(&t, v2, &ps, lim).unwrap(), 1);
        let v1 = t.index_of("v1").unwrap();
        assert_eq!(oracle_msc(&t, v1, &ps, lim).unwrap(), 4);
    }

    #[test]
    fn distinguishability() {
        let t = Topology::load(SAMPLE, None).unwrap();
        let ps = PathSet::parse(&t, "m1 v1 m2\nm2 v4 m3\nm1 v2 v4 m3\n").unwrap();
        let f = |n: &[&str]| FailureSet::new(&t, ids(&t, n)).unwrap();
        assert!(!distinguishable(&t, &ps, &f(&["v4"]), &f(&["v2", "v4"])));
        assert!(distinguishable(&t, &ps, &f(&["v1"]), &f(&["v4"])));
        assert!(FailureSet::new(&t, vec![t.index_of("m1").unwrap()]).is_err());
    }

    #[test]
    fn caps_and_ranges() {
        let t = Topology::load(SAMPLE, None).unwrap();
        let ps = PathSet::parse(&t, "m1 v1 m2\n").unwrap();
        let tight = OracleLimits { max_sigma: 3 };
        assert!(matches!(
            oracle_omega_all(&t, &ps, tight),
            Err(Error::OracleCap { sigma: 4, .. })
        ));
        let v1 = ids(&t, &["v1"]);
        assert!(oracle_k_identifiable(&t, &ps, &v1, 0, OracleLimits::default()).is_err());
        assert!(oracle_k_identifiable(&t, &ps, &v1, 5, OracleLimits::default()).is_err());
        assert!(oracle_k_identifiable(&t, &ps, &[], 1, OracleLimits::default()).is_err());
    }

    #[test]
    fn brute_cut_basics() {
        let g = Graph::from_index_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(brute_vertex_cut(&g, 0, 2, 8).unwrap(), 2);
        assert_eq!(brute_vertex_cut(&g, 0, 1, 8).unwrap(), 4);
        assert!(brute_vertex_cut(&g, 0, 2, 4).is_err());
    }
}
