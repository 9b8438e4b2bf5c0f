//! Topology representation, edge-list loading and the auxiliary graphs the
//! identifiability conditions are stated on.
//!
//! Node identifiers are opaque strings. Every [`Graph`] built from user input
//! stores its nodes in lexicographic order, so dense indices are stable across
//! runs and tie-breaking rules based on "smallest index" are lexicographic.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};

/// Identifier reserved for the virtual monitor of auxiliary graphs.
pub const VIRTUAL_MONITOR: &str = "__m'";

/// Simple undirected graph with named nodes and sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from named edges. Node order is lexicographic.
    pub fn from_edges<S: AsRef<str>>(edges: &[(S, S)]) -> Result<Graph> {
        let mut names: Vec<String> = edges
            .iter()
            .flat_map(|(u, v)| [u.as_ref().to_owned(), v.as_ref().to_owned()])
            .collect();
        names.sort();
        names.dedup();
        let lookup: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let indexed: Vec<(usize, usize)> = edges
            .iter()
            .map(|(u, v)| (lookup[u.as_ref()], lookup[v.as_ref()]))
            .collect();
        Graph::with_names(names, indexed)
    }

    /// Builds a graph over `names` (any order; re-sorted lexicographically)
    /// with edges given as indices into `names`.
    pub fn with_names(
        names: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph> {
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut remap = vec![0; names.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let sorted: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidParameter(format!(
                    "node `{}` listed twice",
                    pair[0]
                )));
            }
        }
        if let Some(reserved) = sorted.iter().find(|n| n.as_str() == VIRTUAL_MONITOR) {
            return Err(Error::ReservedName(reserved.clone()));
        }
        let mut adjacency = vec![Vec::new(); sorted.len()];
        let mut seen = HashSet::new();
        let mut edge_count = 0;
        for (u, v) in edges {
            if u >= names.len() || v >= names.len() {
                return Err(Error::UnknownNode(format!("#{}", u.max(v))));
            }
            let (u, v) = (remap[u], remap[v]);
            if u == v {
                return Err(Error::SelfLoop(sorted[u].clone()));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(sorted[u].clone(), sorted[v].clone()));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            edge_count += 1;
        }
        Ok(Graph::assemble(sorted, adjacency, edge_count))
    }

    /// Graph with `n` nodes named by zero-padded indices, so index order and
    /// lexicographic order coincide.
    pub fn from_index_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph> {
        let width = n.saturating_sub(1).to_string().len();
        let names = (0..n).map(|i| format!("{i:0width$}")).collect();
        Graph::with_names(names, edges)
    }

    fn assemble(names: Vec<String>, mut adjacency: Vec<Vec<usize>>, edge_count: usize) -> Graph {
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Graph {
            names,
            index,
            adjacency,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        if self.names.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.node_count()
    }
}

/// Parsed edge-list document, before validation into a [`Topology`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub edges: Vec<(String, String)>,
    /// Monitors named by a `# monitors:` header line, if present.
    pub monitors: Option<Vec<String>>,
}

/// Parses the edge-list text format: one `u v` pair per line, `#` comments,
/// and an optional `# monitors: m1 m2 ...` header.
pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut out = EdgeList::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(list) = comment.trim_start().strip_prefix("monitors:") {
                out.monitors
                    .get_or_insert_with(Vec::new)
                    .extend(parse_name_list(list));
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [u, v] => out.edges.push(((*u).to_owned(), (*v).to_owned())),
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected `u v`, found `{line}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Splits a monitor or node list on whitespace and commas, dropping `#`
/// comment lines.
pub fn parse_name_list(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Connected graph with a non-empty monitor set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    graph: Graph,
    is_monitor: Vec<bool>,
    monitors: Vec<usize>,
    non_monitors: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl Topology {
    pub fn new(graph: Graph, monitors: &[usize]) -> Result<Topology> {
        if graph.node_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut is_monitor = vec![false; graph.node_count()];
        for &m in monitors {
            if m >= graph.node_count() {
                return Err(Error::UnknownMonitor(format!("#{m}")));
            }
            is_monitor[m] = true;
        }
        let monitors: Vec<usize> = (0..graph.node_count()).filter(|&v| is_monitor[v]).collect();
        if monitors.is_empty() {
            return Err(Error::NoMonitors);
        }
        let non_monitors: Vec<usize> = (0..graph.node_count()).filter(|&v| !is_monitor[v]).collect();
        let mut position = vec![None; graph.node_count()];
        for (i, &v) in non_monitors.iter().enumerate() {
            position[v] = Some(i);
        }
        Ok(Topology {
            graph,
            is_monitor,
            monitors,
            non_monitors,
            position,
        })
    }

    pub fn with_monitor_names<S: AsRef<str>>(graph: Graph, monitors: &[S]) -> Result<Topology> {
        let ids = monitors
            .iter()
            .map(|m| {
                graph
                    .index_of(m.as_ref())
                    .ok_or_else(|| Error::UnknownMonitor(m.as_ref().to_owned()))
            })
            .collect::<Result<Vec<_>>>()?;
        Topology::new(graph, &ids)
    }

    /// Loads an edge-list document. An explicit monitor list overrides the
    /// document's `# monitors:` header.
    pub fn load(text: &str, monitors: Option<&[String]>) -> Result<Topology> {
        let doc = parse_edge_list(text)?;
        let monitors = match monitors {
            Some(list) => list.to_vec(),
            None => doc.monitors.clone().unwrap_or_default(),
        };
        if monitors.is_empty() {
            return Err(Error::NoMonitors);
        }
        let graph = Graph::from_edges(&doc.edges)?;
        Topology::with_monitor_names(graph, &monitors)
    }

    /// Serializes back to the edge-list format with a monitor header.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::from("# monitors:");
        for &m in &self.monitors {
            out.push(' ');
            out.push_str(self.name(m));
        }
        out.push('\n');
        for (u, v) in self.graph.edges() {
            out.push_str(self.name(u));
            out.push(' ');
            out.push_str(self.name(v));
            out.push('\n');
        }
        out
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn name(&self, v: usize) -> &str {
        self.graph.name(v)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.graph.index_of(name)
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn monitors(&self) -> &[usize] {
        &self.monitors
    }

    pub fn non_monitors(&self) -> &[usize] {
        &self.non_monitors
    }

    pub fn is_monitor(&self, v: usize) -> bool {
        self.is_monitor[v]
    }

    /// Index of `v` within [`Topology::non_monitors`].
    pub fn position(&self, v: usize) -> Option<usize> {
        self.position.get(v).copied().flatten()
    }

    /// μ
    pub fn mu(&self) -> usize {
        self.monitors.len()
    }

    /// σ
    pub fn sigma(&self) -> usize {
        self.non_monitors.len()
    }

    /// ξ
    pub fn xi(&self) -> usize {
        self.graph.edge_count()
    }

    /// Non-monitors adjacent to at least one monitor, N(M).
    pub fn monitor_neighbors(&self) -> Vec<usize> {
        self.non_monitors
            .iter()
            .copied()
            .filter(|&v| self.monitor_degree(v) > 0)
            .collect()
    }

    /// θ
    pub fn theta(&self) -> usize {
        self.monitor_neighbors().len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.graph.degree(v)
    }

    /// Number of monitors adjacent to `v`.
    pub fn monitor_degree(&self, v: usize) -> usize {
        self.graph
            .neighbors(v)
            .iter()
            .filter(|&&w| self.is_monitor[w])
            .count()
    }

    /// Number of non-monitors adjacent to `v`.
    pub fn non_monitor_degree(&self, v: usize) -> usize {
        self.degree(v) - self.monitor_degree(v)
    }

    pub fn non_monitor(&self, name: &str) -> Result<usize> {
        let v = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownNode(name.to_owned()))?;
        if self.is_monitor(v) {
            return Err(Error::NotANonMonitor(name.to_owned()));
        }
        Ok(v)
    }

    pub fn monitor(&self, name: &str) -> Result<usize> {
        let v = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownNode(name.to_owned()))?;
        if !self.is_monitor(v) {
            return Err(Error::NotAMonitor(name.to_owned()));
        }
        Ok(v)
    }

    /// Resolves a list of non-monitor names into sorted, deduplicated indices.
    pub fn non_monitor_set<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut set = names
            .iter()
            .map(|n| self.non_monitor(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        set.sort_unstable();
        set.dedup();
        Ok(set)
    }

    pub(crate) fn require_non_monitor(&self, v: usize) -> Result<()> {
        match self.position(v) {
            Some(_) => Ok(()),
            None if v < self.node_count() => Err(Error::NotANonMonitor(self.name(v).to_owned())),
            None => Err(Error::UnknownNode(format!("#{v}"))),
        }
    }

    pub(crate) fn require_non_monitor_set(&self, set: &[usize]) -> Result<()> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        set.iter().try_for_each(|&v| self.require_non_monitor(v))
    }
}

/// Which construction produced an [`AuxiliaryGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxKind {
    /// Non-monitors plus `m'` joined to every monitor neighbor.
    Star,
    /// As [`AuxKind::Star`], but ignoring neighbors contributed only by this monitor.
    MinusMonitor(usize),
    /// Whole graph plus `m'` joined to every monitor.
    Extended,
    /// Extended graph with this non-monitor deleted.
    ExtendedMinus(usize),
}

/// Graph derived from a topology with a single virtual monitor `m'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxiliaryGraph {
    graph: Graph,
    virtual_monitor: usize,
    kind: AuxKind,
    to_topology: Vec<Option<usize>>,
    from_topology: Vec<Option<usize>>,
}

impl AuxiliaryGraph {
    fn build(t: &Topology, keep: impl Fn(usize) -> bool, links: &[usize], kind: AuxKind) -> Self {
        let kept: Vec<usize> = (0..t.node_count()).filter(|&v| keep(v)).collect();
        let mut from_topology = vec![None; t.node_count()];
        for (i, &v) in kept.iter().enumerate() {
            from_topology[v] = Some(i);
        }
        let virtual_monitor = kept.len();
        let mut names: Vec<String> = kept.iter().map(|&v| t.name(v).to_owned()).collect();
        names.push(VIRTUAL_MONITOR.to_owned());
        let mut adjacency = vec![Vec::new(); names.len()];
        let mut edge_count = 0;
        for (u, v) in t.graph().edges() {
            if let (Some(a), Some(b)) = (from_topology[u], from_topology[v]) {
                adjacency[a].push(b);
                adjacency[b].push(a);
                edge_count += 1;
            }
        }
        for &x in links {
            if let Some(a) = from_topology[x] {
                adjacency[a].push(virtual_monitor);
                adjacency[virtual_monitor].push(a);
                edge_count += 1;
            }
        }
        let mut to_topology: Vec<Option<usize>> = kept.into_iter().map(Some).collect();
        to_topology.push(None);
        AuxiliaryGraph {
            graph: Graph::assemble(names, adjacency, edge_count),
            virtual_monitor,
            kind,
            to_topology,
            from_topology,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Index of `m'` in [`AuxiliaryGraph::graph`].
    pub fn virtual_monitor(&self) -> usize {
        self.virtual_monitor
    }

    pub fn kind(&self) -> AuxKind {
        self.kind
    }

    /// Auxiliary index of a topology node, if it was retained.
    pub fn node_of(&self, topology_node: usize) -> Option<usize> {
        self.from_topology.get(topology_node).copied().flatten()
    }

    /// Topology index of an auxiliary node (`None` for `m'`).
    pub fn topology_node(&self, aux_node: usize) -> Option<usize> {
        self.to_topology.get(aux_node).copied().flatten()
    }
}

/// G*: non-monitors plus `m'` adjacent to exactly N(M).
pub fn build_star(t: &Topology) -> AuxiliaryGraph {
    AuxiliaryGraph::build(
        t,
        |v| !t.is_monitor(v),
        &t.monitor_neighbors(),
        AuxKind::Star,
    )
}

/// G_m: non-monitors plus `m'` adjacent to exactly N(M \ {m}).
pub fn build_minus_monitor(t: &Topology, m: usize) -> Result<AuxiliaryGraph> {
    if m >= t.node_count() {
        return Err(Error::UnknownNode(format!("#{m}")));
    }
    if !t.is_monitor(m) {
        return Err(Error::NotAMonitor(t.name(m).to_owned()));
    }
    let links: Vec<usize> = t
        .non_monitors()
        .iter()
        .copied()
        .filter(|&v| t.graph().neighbors(v).iter().any(|&w| w != m && t.is_monitor(w)))
        .collect();
    Ok(AuxiliaryGraph::build(
        t,
        |v| !t.is_monitor(v),
        &links,
        AuxKind::MinusMonitor(m),
    ))
}

/// G': the whole topology plus `m'` adjacent to every monitor.
pub fn build_extended(t: &Topology) -> AuxiliaryGraph {
    AuxiliaryGraph::build(t, |_| true, t.monitors(), AuxKind::Extended)
}

/// G'_w: the extended graph with non-monitor `w` deleted.
pub fn build_extended_minus(t: &Topology, w: usize) -> Result<AuxiliaryGraph> {
    t.require_non_monitor(w)?;
    Ok(AuxiliaryGraph::build(
        t,
        |v| v != w,
        t.monitors(),
        AuxKind::ExtendedMinus(w),
    ))
}
