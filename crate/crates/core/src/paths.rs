//! Measurement paths: construction under each probing mechanism, the path
//! text format, and failure simulation.

use std::collections::{HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Topology;

/// Walk between two monitors together with the non-monitors it traverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    nodes: Vec<usize>,
    trace: Vec<usize>,
}

impl Path {
    /// Validates that `nodes` is a walk in `t` from a monitor to a monitor.
    pub fn new(t: &Topology, nodes: Vec<usize>) -> Result<Path> {
        let invalid = |msg: &str| Error::InvalidPath(msg.to_owned());
        if nodes.len() < 2 {
            return Err(invalid("a path needs at least two nodes"));
        }
        if let Some(&v) = nodes.iter().find(|&&v| v >= t.node_count()) {
            return Err(Error::UnknownNode(format!("#{v}")));
        }
        let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
        if !t.is_monitor(first) || !t.is_monitor(last) {
            return Err(invalid(&format!(
                "endpoints `{}` and `{}` must both be monitors",
                t.name(first),
                t.name(last)
            )));
        }
        for pair in nodes.windows(2) {
            if !t.graph().has_edge(pair[0], pair[1]) {
                return Err(invalid(&format!(
                    "`{}` and `{}` are not adjacent",
                    t.name(pair[0]),
                    t.name(pair[1])
                )));
            }
        }
        let mut trace: Vec<usize> = nodes.iter().copied().filter(|&v| !t.is_monitor(v)).collect();
        trace.sort_unstable();
        trace.dedup();
        Ok(Path { nodes, trace })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Sorted set of non-monitors on the path.
    pub fn trace(&self) -> &[usize] {
        &self.trace
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::new();
        self.nodes.iter().all(|v| seen.insert(v))
    }

    fn canonical(&self) -> Vec<usize> {
        let reversed: Vec<usize> = self.nodes.iter().rev().copied().collect();
        reversed.min(self.nodes.clone())
    }

    pub fn display(&self, t: &Topology) -> String {
        self.nodes
            .iter()
            .map(|&v| t.name(v))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Deduplicated collection of measurement paths with per-node incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    paths: Vec<Path>,
    incidence: Vec<FixedBitSet>,
}

impl PathSet {
    /// Collects paths, dropping repeats of a node sequence or its reverse.
    pub fn new(t: &Topology, paths: impl IntoIterator<Item = Path>) -> PathSet {
        let mut seen = HashSet::new();
        let paths: Vec<Path> = paths
            .into_iter()
            .filter(|p| seen.insert(p.canonical()))
            .collect();
        let mut incidence = vec![FixedBitSet::with_capacity(paths.len()); t.node_count()];
        for (i, p) in paths.iter().enumerate() {
            for &v in p.trace() {
                incidence[v].insert(i);
            }
        }
        PathSet { paths, incidence }
    }

    /// Parses one whitespace-separated path per line; `#` starts a comment.
    pub fn parse(t: &Topology, text: &str) -> Result<PathSet> {
        let mut paths = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nodes = line
                .split_whitespace()
                .map(|name| {
                    t.index_of(name)
                        .ok_or_else(|| Error::UnknownNode(name.to_owned()))
                })
                .collect::<Result<Vec<_>>>()?;
            let path = Path::new(t, nodes).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            paths.push(path);
        }
        Ok(PathSet::new(t, paths))
    }

    pub fn to_text(&self, t: &Topology) -> String {
        self.paths
            .iter()
            .map(|p| p.display(t) + "\n")
            .collect()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    /// Indices of the paths traversing `v` (`P_v`).
    pub fn through(&self, v: usize) -> &FixedBitSet {
        &self.incidence[v]
    }

    /// Paths whose trace is exactly `{v}`.
    pub fn has_direct_path(&self, v: usize) -> bool {
        self.through(v)
            .ones()
            .any(|i| self.paths[i].trace() == [v])
    }

    /// Paths hit by failure set `failed`, `P_F`.
    pub fn affected(&self, t: &Topology, failed: &[usize]) -> Result<FixedBitSet> {
        let mut out = FixedBitSet::with_capacity(self.len());
        for &v in failed {
            t.require_non_monitor(v)?;
            out.union_with(self.through(v));
        }
        Ok(out)
    }

    /// Path states for a node-state vector (`true` = failed, indexed by
    /// non-monitor position): boolean `R ⊙ w`.
    pub fn simulate(&self, t: &Topology, states: &[bool]) -> Result<Vec<bool>> {
        if states.len() != t.sigma() {
            return Err(Error::DimensionMismatch {
                expected: t.sigma(),
                got: states.len(),
            });
        }
        Ok(self
            .paths
            .iter()
            .map(|p| p.trace().iter().any(|&v| states[t.position(v).unwrap_or(0)]))
            .collect())
    }

    /// Path-node incidence matrix, rows indexed by path and columns by
    /// non-monitor position.
    pub fn measurement_matrix(&self, t: &Topology) -> Vec<Vec<bool>> {
        self.paths
            .iter()
            .map(|p| {
                let mut row = vec![false; t.sigma()];
                for &v in p.trace() {
                    if let Some(i) = t.position(v) {
                        row[i] = true;
                    }
                }
                row
            })
            .collect()
    }
}

/// Size limits for exhaustive path enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumLimits {
    pub max_nodes: usize,
    pub max_edges: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_nodes: 14,
            max_edges: 20,
        }
    }
}

impl EnumLimits {
    fn check(&self, t: &Topology) -> Result<()> {
        if t.node_count() > self.max_nodes || t.xi() > self.max_edges {
            return Err(Error::EnumerationCap {
                nodes: t.node_count(),
                edges: t.xi(),
                max_nodes: self.max_nodes,
                max_edges: self.max_edges,
            });
        }
        Ok(())
    }
}

/// One shortest path per monitor pair. BFS visits neighbors in index order
/// and each node's predecessor is its smallest-index neighbor one hop closer
/// to the source.
pub fn route_up(t: &Topology) -> PathSet {
    let g = t.graph();
    let mut paths = Vec::new();
    for (i, &a) in t.monitors().iter().enumerate() {
        let mut dist = vec![usize::MAX; g.node_count()];
        dist[a] = 0;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        for &b in &t.monitors()[i + 1..] {
            let mut nodes = vec![b];
            let mut x = b;
            while x != a {
                x = g
                    .neighbors(x)
                    .iter()
                    .copied()
                    .find(|&y| dist[y] + 1 == dist[x])
                    .expect("connected topology");
                nodes.push(x);
            }
            nodes.reverse();
            paths.push(Path {
                trace: sorted_trace(t, &nodes),
                nodes,
            });
        }
    }
    PathSet::new(t, paths)
}

fn sorted_trace(t: &Topology, nodes: &[usize]) -> Vec<usize> {
    let mut trace: Vec<usize> = nodes.iter().copied().filter(|&v| !t.is_monitor(v)).collect();
    trace.sort_unstable();
    trace.dedup();
    trace
}

/// All simple paths between distinct monitors. Interior nodes may be monitors.
pub fn enumerate_csp(t: &Topology, limits: EnumLimits) -> Result<PathSet> {
    limits.check(t)?;
    let mut paths = Vec::new();
    let mut visited = vec![false; t.node_count()];
    let mut stack = Vec::new();

    fn extend(
        t: &Topology,
        source: usize,
        stack: &mut Vec<usize>,
        visited: &mut [bool],
        out: &mut Vec<Path>,
    ) {
        let u = *stack.last().expect("non-empty");
        if u > source && t.is_monitor(u) {
            out.push(Path {
                trace: sorted_trace(t, stack),
                nodes: stack.clone(),
            });
        }
        for &w in t.graph().neighbors(u) {
            if !visited[w] {
                visited[w] = true;
                stack.push(w);
                extend(t, source, stack, visited, out);
                stack.pop();
                visited[w] = false;
            }
        }
    }

    for &a in t.monitors() {
        visited[a] = true;
        stack.push(a);
        extend(t, a, &mut stack, &mut visited, &mut paths);
        stack.pop();
        visited[a] = false;
    }
    Ok(PathSet::new(t, paths))
}

/// One witness walk per achievable trace under arbitrary monitor-to-monitor
/// walks.
///
/// A non-empty trace `T` is achievable iff `T` lies inside a single connected
/// component of the subgraph induced by `T ∪ M` that also contains a monitor.
/// The witness is an Euler tour of a BFS tree of that component rooted at its
/// smallest monitor. The empty trace is achievable iff two monitors are
/// adjacent.
pub fn enumerate_cap(t: &Topology, limits: EnumLimits) -> Result<PathSet> {
    limits.check(t)?;
    let g = t.graph();
    let n = g.node_count();
    let sigma = t.sigma();
    let mut paths = Vec::new();

    if let Some((u, v)) = g.edges().find(|&(u, v)| t.is_monitor(u) && t.is_monitor(v)) {
        paths.push(Path {
            nodes: vec![u, v],
            trace: Vec::new(),
        });
    }

    let mut allowed = vec![false; n];
    let mut parent = vec![usize::MAX; n];
    for mask in 1u64..(1u64 << sigma) {
        for (v, a) in allowed.iter_mut().enumerate() {
            *a = t.is_monitor(v);
        }
        let members: Vec<usize> = (0..sigma)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| t.non_monitors()[i])
            .collect();
        for &v in &members {
            allowed[v] = true;
        }
        // BFS from the first member over allowed nodes.
        parent.iter_mut().for_each(|p| *p = usize::MAX);
        let start = members[0];
        parent[start] = start;
        let mut component = vec![start];
        let mut head = 0;
        while head < component.len() {
            let u = component[head];
            head += 1;
            for &w in g.neighbors(u) {
                if allowed[w] && parent[w] == usize::MAX {
                    parent[w] = u;
                    component.push(w);
                }
            }
        }
        if members.iter().any(|&v| parent[v] == usize::MAX) {
            continue;
        }
        let Some(&root) = component.iter().filter(|&&v| t.is_monitor(v)).min() else {
            continue;
        };
        let nodes = euler_tour(g, &component, &allowed, root);
        paths.push(Path {
            trace: members,
            nodes,
        });
    }
    Ok(PathSet::new(t, paths))
}

/// Closed walk around a BFS spanning tree of `component` rooted at `root`.
fn euler_tour(g: &crate::graph::Graph, component: &[usize], allowed: &[bool], root: usize) -> Vec<usize> {
    let n = g.node_count();
    let mut in_component = vec![false; n];
    for &v in component {
        in_component[v] = true;
    }
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if allowed[w] && in_component[w] && !seen[w] {
                seen[w] = true;
                children[u].push(w);
                queue.push_back(w);
            }
        }
    }
    let mut walk = vec![root];
    let mut stack = vec![(root, 0usize)];
    while let Some(frame) = stack.last_mut() {
        let (u, i) = *frame;
        if let Some(&c) = children[u].get(i) {
            frame.1 += 1;
            walk.push(c);
            stack.push((c, 0));
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                walk.push(p);
            }
        }
    }
    walk
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

    fn texts(t: &Topology, ps: &PathSet) -> Vec<String> {
        let mut out: Vec<String> = ps.paths().iter().map(|p| p.display(t)).collect();
        out.sort();
        out
    }

    #[test]
    fn up_routes_follow_tie_rule() {
        let t = sample();
        let ps = route_up(&t);
        assert_eq!(texts(&t, &ps), ["m1 v1 m2", "m1 v2 v3 m3", "m2 v3 m3"]);
    }

    #[test]
    fn parse_and_export() {
        let t = sample();
        let ps = PathSet::parse(&t, "# paths\nm1 v1 m2\n\nm2 v4 m3 # short\nm3 v4 m2\n").unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(PathSet::parse(&t, &ps.to_text(&t)).unwrap(), ps);
        assert!(matches!(
            PathSet::parse(&t, "m1 v3 m3\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(PathSet::parse(&t, "m1 v1\n").is_err());
        assert!(matches!(
            PathSet::parse(&t, "m1 zz m2\n"),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn simulate_and_affected() {
        let t = sample();
        let ps = PathSet::parse(&t, "m1 v1 m2\nm2 v4 m3\nm1 v2 v4 m3\n").unwrap();
        let v4 = t.index_of("v4").unwrap();
        let hit = ps.affected(&t, &[v4]).unwrap();
        assert_eq!(hit.ones().collect::<Vec<_>>(), [1, 2]);
        let states = vec![false, false, false, true];
        assert_eq!(ps.simulate(&t, &states).unwrap(), [false, true, true]);
        assert!(matches!(
            ps.simulate(&t, &[true]),
            Err(Error::DimensionMismatch { expected: 4, got: 1 })
        ));
        let r = ps.measurement_matrix(&t);
        assert_eq!(r[2], [false, true, false, true]);
        assert!(ps.affected(&t, &[t.index_of("m1").unwrap()]).is_err());
    }

    #[test]
    fn csp_enumeration_is_simple_and_unique() {
        let t = sample();
        let ps = enumerate_csp(&t, EnumLimits::default()).unwrap();
        assert!(ps.paths().iter().all(Path::is_simple));
        let set: HashSet<Vec<usize>> = ps.paths().iter().map(Path::canonical).collect();
        assert_eq!(set.len(), ps.len());
        let listed = texts(&t, &ps);
        assert!(listed.contains(&"m1 v2 v4 m3".to_string()));
        assert!(listed.contains(&"m1 v1 m2 v3 m3".to_string()));
    }

    #[test]
    fn enumeration_caps() {
        let t = sample();
        let tight = EnumLimits {
            max_nodes: 5,
            max_edges: 20,
        };
        assert!(matches!(
            enumerate_csp(&t, tight),
            Err(Error::EnumerationCap { .. })
        ));
        assert!(enumerate_cap(&t, tight).is_err());
    }

    #[test]
    fn cap_witnesses_are_valid_walks() {
        let t = sample();
        let ps = enumerate_cap(&t, EnumLimits::default()).unwrap();
        for p in ps.paths() {
            let again = Path::new(&t, p.nodes().to_vec()).unwrap();
            assert_eq!(again.trace(), p.trace());
        }
        // every non-empty subset of the four non-monitors is achievable here
        assert_eq!(ps.len(), 15);
    }

    #[test]
    fn cap_empty_trace_needs_monitor_edge() {
        let t = Topology::load("# monitors: a b\na b\nb v\n", None).unwrap();
        let ps = enumerate_cap(&t, EnumLimits::default()).unwrap();
        assert!(ps.paths().iter().any(|p| p.trace().is_empty()));
        assert_eq!(ps.len(), 2);
    }
}
