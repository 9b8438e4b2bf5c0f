//! Minimum vertex cuts and 2-vertex-connectivity queries.
//!
//! Cut sizes for non-adjacent pairs come from unit-capacity max flow on the
//! node-split digraph. Adjacent pairs cannot be separated by deleting
//! vertices; their cut size is defined as `|V| - 1`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CutQueryResult {
    pub source: usize,
    pub sink: usize,
    pub cut_size: usize,
    /// True when the pair is adjacent and the size is `|V| - 1` by convention.
    pub adjacent_case: bool,
}

struct FlowNetwork {
    head: Vec<usize>,
    next: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![NIL; nodes],
            next: Vec::new(),
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn arc(&mut self, u: usize, v: usize, cap: u32) {
        for (a, b, c) in [(u, v, cap), (v, u, 0)] {
            self.to.push(b);
            self.cap.push(c);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
    }

    fn arcs(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        let mut e = self.head[u];
        std::iter::from_fn(move || {
            let current = e;
            if current == NIL {
                return None;
            }
            e = self.next[current];
            Some(current)
        })
    }

    /// Residual BFS from `s`; returns the arc used to enter each node.
    fn bfs(&self, s: usize) -> Vec<usize> {
        let mut via = vec![NIL; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for e in self.arcs(u) {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    via[v] = e;
                    queue.push_back(v);
                }
            }
        }
        via[s] = 0;
        via
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut flow = 0;
        loop {
            let via = self.bfs(s);
            if via[t] == NIL {
                return flow;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.to[e ^ 1];
            }
            flow += 1;
        }
    }
}

fn check_pair(g: &Graph, s: usize, t: usize) -> Result<()> {
    let n = g.node_count();
    if s >= n || t >= n {
        return Err(Error::UnknownNode(format!("#{}", s.max(t))));
    }
    if s == t {
        return Err(Error::SameEndpoints);
    }
    Ok(())
}

fn split_network(g: &Graph) -> FlowNetwork {
    let n = g.node_count();
    let big = n as u32 + 1;
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        net.arc(2 * v, 2 * v + 1, 1);
    }
    for (u, v) in g.edges() {
        net.arc(2 * u + 1, 2 * v, big);
        net.arc(2 * v + 1, 2 * u, big);
    }
    net
}

/// Solves the flow problem for a non-adjacent pair and returns the network.
fn solve(g: &Graph, s: usize, t: usize) -> (usize, FlowNetwork) {
    let mut net = split_network(g);
    let flow = net.max_flow(2 * s + 1, 2 * t);
    (flow, net)
}

/// Size of a minimum `s`-`t` vertex cut, `C_G(s, t)`.
pub fn min_vertex_cut_size(g: &Graph, s: usize, t: usize) -> Result<CutQueryResult> {
    check_pair(g, s, t)?;
    let (cut_size, adjacent_case) = if g.has_edge(s, t) {
        (g.node_count() - 1, true)
    } else {
        (solve(g, s, t).0, false)
    };
    Ok(CutQueryResult {
        source: s,
        sink: t,
        cut_size,
        adjacent_case,
    })
}

/// A minimum vertex cut separating non-adjacent `s` and `t`, sorted.
/// Adjacent pairs have no separating set and yield `None`.
pub fn min_vertex_cut_witness(g: &Graph, s: usize, t: usize) -> Result<Option<Vec<usize>>> {
    check_pair(g, s, t)?;
    if g.has_edge(s, t) {
        return Ok(None);
    }
    let (_, net) = solve(g, s, t);
    let via = net.bfs(2 * s + 1);
    let reached = |x: usize| via[x] != NIL;
    Ok(Some(
        (0..g.node_count())
            .filter(|&v| v != s && v != t && reached(2 * v) && !reached(2 * v + 1))
            .collect(),
    ))
}

/// `Γ_G(S, m) = min_{w ∈ S} C_G(w, m)`.
pub fn gamma(g: &Graph, set: &[usize], m: usize) -> Result<usize> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = usize::MAX;
    for &w in set {
        best = best.min(min_vertex_cut_size(g, w, m)?.cut_size);
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// Biconnected-component membership of every node.
#[derive(Debug, Clone)]
pub struct Biconnected {
    blocks: Vec<Vec<usize>>,
}

impl Biconnected {
    pub fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let mut disc = vec![NIL; n];
        let mut low = vec![0; n];
        let mut blocks = vec![Vec::new(); n];
        let mut block_count = 0;
        let mut time = 0;
        let mut edge_stack: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            if disc[root] != NIL {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut call: Vec<(usize, usize, usize)> = vec![(root, NIL, 0)];
            while let Some(frame) = call.last_mut() {
                let (v, parent) = (frame.0, frame.1);
                if let Some(&w) = g.neighbors(v).get(frame.2) {
                    frame.2 += 1;
                    if disc[w] == NIL {
                        edge_stack.push((v, w));
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        call.push((w, v, 0));
                    } else if w != parent && disc[w] < disc[v] {
                        edge_stack.push((v, w));
                        low[v] = low[v].min(disc[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(u, _, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        while let Some((a, b)) = edge_stack.pop() {
                            for x in [a, b] {
                                if blocks[x].last() != Some(&block_count) {
                                    blocks[x].push(block_count);
                                }
                            }
                            if (a, b) == (u, v) {
                                break;
                            }
                        }
                        block_count += 1;
                    }
                }
            }
        }
        Biconnected { blocks }
    }

    /// Whether `u` and `v` lie in a common biconnected component.
    pub fn share_block(&self, u: usize, v: usize) -> bool {
        let (a, b) = (&self.blocks[u], &self.blocks[v]);
        a.iter().any(|x| b.contains(x))
    }
}

/// True iff `C_G(s, t) >= 2`, via biconnected components.
pub fn two_connected(g: &Graph, s: usize, t: usize) -> Result<bool> {
    check_pair(g, s, t)?;
    Ok(two_connected_with(g, &Biconnected::new(g), s, t))
}

/// [`two_connected`] against a precomputed decomposition of `g`.
pub fn two_connected_with(g: &Graph, bcc: &Biconnected, s: usize, t: usize) -> bool {
    if g.has_edge(s, t) {
        g.node_count() >= 3
    } else {
        bcc.share_block(s, t)
    }
}
