use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graph::{build_star, Topology};
use crate::oracle::{oracle_msc, oracle_omega_all, OracleLimits};
use crate::paths::{enumerate_cap, enumerate_csp, route_up, EnumLimits, PathSet};

use super::cap::star_cut;
use super::csp::{self, CspGraphs, CspInternals};
use super::one::{one_identifiable_csp_all, one_identifiable_paths_all};
use super::up::{self, greedy_set_cover, omega_from_cover, omega_up};
use super::{check_k, IntBounds, Mechanism, Omega, Rule, SetBounds, TriState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnalysisOptions {
    /// Tighten bounds with exhaustive oracles (small instances only).
    pub exact: bool,
    /// Fold the dedicated 1-identifiability test into the per-node bounds.
    pub fold_one: bool,
    pub enumeration: EnumLimits,
    pub oracle: OracleLimits,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            exact: false,
            fold_one: true,
            enumeration: EnumLimits::default(),
            oracle: OracleLimits::default(),
        }
    }
}

impl AnalysisOptions {
    pub fn exact() -> Self {
        AnalysisOptions {
            exact: true,
            ..AnalysisOptions::default()
        }
    }
}

/// Everything computed for one non-monitor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeResult {
    pub node: usize,
    /// Bounds from the mechanism's cut or cover conditions alone.
    pub theorem: Omega,
    pub one_identifiable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csp: Option<CspInternals>,
    /// Number of paths through the node (fixed routing).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greedy_cover: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_cover: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<usize>,
    /// Intersection of every available bound.
    pub bounds: IntBounds,
    /// False if two sources of bounds disagreed; `bounds` then keeps the
    /// theorem bounds.
    pub consistent: bool,
}

/// Per-node analysis of one topology under one mechanism.
#[derive(Debug, Clone)]
pub struct Analyzer<'t> {
    topology: &'t Topology,
    mechanism: Mechanism,
    options: AnalysisOptions,
    paths: Option<PathSet>,
    nodes: Vec<NodeResult>,
}

impl<'t> Analyzer<'t> {
    /// Runs the analysis. Fixed routing uses `paths` when given and the
    /// shortest-path routes otherwise; the path-free mechanisms ignore `paths`.
    pub fn new(
        topology: &'t Topology,
        mechanism: Mechanism,
        paths: Option<PathSet>,
        options: AnalysisOptions,
    ) -> Result<Analyzer<'t>> {
        let t = topology;
        let paths = match mechanism {
            Mechanism::Up => Some(paths.unwrap_or_else(|| route_up(t))),
            Mechanism::Cap if options.exact => Some(enumerate_cap(t, options.enumeration)?),
            Mechanism::Csp if options.exact => Some(enumerate_csp(t, options.enumeration)?),
            _ => None,
        };
        let oracle = match (&paths, options.exact) {
            (Some(ps), true) => Some(oracle_omega_all(t, ps, options.oracle)?),
            _ => None,
        };

        let mut nodes: Vec<NodeResult> = match mechanism {
            Mechanism::Cap => {
                let star = build_star(t);
                t.non_monitors()
                    .par_iter()
                    .map(|&v| {
                        let cut = star_cut(&star, v)?;
                        Ok(NodeResult::new(v, Omega::new(IntBounds::exact(cut), Rule::StarCut), true))
                    })
                    .collect::<Result<_>>()?
            }
            Mechanism::Csp => {
                let graphs = CspGraphs::new(t);
                let one = one_identifiable_csp_all(t);
                t.non_monitors()
                    .par_iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let c = graphs.internals(t, v)?;
                        let mut r = NodeResult::new(v, csp::omega_from_internals(t, v, &c), one[i]);
                        r.csp = Some(c);
                        Ok(r)
                    })
                    .collect::<Result<_>>()?
            }
            Mechanism::Up => {
                let ps = paths.as_ref().expect("fixed routing has paths");
                let one = one_identifiable_paths_all(t, ps);
                t.non_monitors()
                    .par_iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let mut r = NodeResult::new(v, omega_up(t, v, ps)?, one[i]);
                        r.path_count = Some(ps.through(v).count_ones(..));
                        r.greedy_cover = Some(greedy_set_cover(t, v, ps)?);
                        if options.exact {
                            r.min_cover = Some(oracle_msc(t, v, ps, options.oracle)?);
                        }
                        Ok(r)
                    })
                    .collect::<Result<_>>()?
            }
        };

        for (i, r) in nodes.iter_mut().enumerate() {
            r.oracle = oracle.as_ref().map(|o| o[i]);
            r.refine(t, options);
        }
        Ok(Analyzer {
            topology,
            mechanism,
            options,
            paths,
            nodes,
        })
    }

    pub fn topology(&self) -> &Topology {
        self.topology
    }

    pub fn mechanism(&self) -> Mechanism {
        self.mechanism
    }

    pub fn options(&self) -> AnalysisOptions {
        self.options
    }

    /// Paths in use: the routes for fixed routing, the enumeration in exact mode.
    pub fn paths(&self) -> Option<&PathSet> {
        self.paths.as_ref()
    }

    /// Results ordered like [`Topology::non_monitors`].
    pub fn nodes(&self) -> &[NodeResult] {
        &self.nodes
    }

    pub fn node(&self, v: usize) -> Result<&NodeResult> {
        self.topology.require_non_monitor(v)?;
        Ok(&self.nodes[self.topology.position(v).expect("non-monitor")])
    }

    fn results(&self, set: &[usize]) -> Result<Vec<&NodeResult>> {
        self.topology.require_non_monitor_set(set)?;
        set.iter().map(|&v| self.node(v)).collect()
    }

    /// Bounds on Ω(S) = min over members.
    pub fn omega_set(&self, set: &[usize]) -> Result<IntBounds> {
        let rs = self.results(set)?;
        let lo = rs.iter().map(|r| r.bounds.lo).min().expect("non-empty");
        let hi = rs.iter().map(|r| r.bounds.hi).min().expect("non-empty");
        Ok(IntBounds::new(lo, hi))
    }

    /// Tri-state answer for k-identifiability of `set`.
    pub fn k_identifiable(&self, set: &[usize], k: usize) -> Result<TriState> {
        let t = self.topology;
        let rs = self.results(set)?;
        check_k(k, t.sigma())?;
        if self.options.exact {
            let omega = rs.iter().filter_map(|r| r.oracle).min().expect("oracle values");
            return Ok(TriState::from_bool(omega >= k, Rule::Oracle));
        }
        let answer = match self.mechanism {
            Mechanism::Cap => {
                let cut = rs.iter().map(|r| r.theorem.bounds.lo).min().expect("non-empty");
                TriState::from_bool(cut >= k, Rule::StarCut)
            }
            Mechanism::Csp => {
                let internals: Vec<CspInternals> =
                    rs.iter().map(|r| r.csp.expect("csp internals")).collect();
                csp::k_identifiable_from(t, set, k, &internals)
            }
            Mechanism::Up => {
                let bounds: Vec<IntBounds> = rs.iter().map(|r| r.theorem.bounds).collect();
                up::k_identifiable_from(t, set, k, self.paths.as_ref().expect("paths"), &bounds)
            }
        };
        if answer.decided().is_some() {
            return Ok(answer);
        }
        if k == 1 && self.options.fold_one {
            return Ok(TriState::from_bool(
                rs.iter().all(|r| r.one_identifiable),
                Rule::OneIdentifiability,
            ));
        }
        let bounds = self.omega_set(set)?;
        Ok(if bounds.lo >= k {
            TriState::Identifiable(Rule::RefinedBounds)
        } else if bounds.hi < k {
            TriState::NotIdentifiable(Rule::RefinedBounds)
        } else {
            answer
        })
    }

    /// Inner and outer bounds on the maximal k-identifiable set.
    pub fn max_identifiable_set(&self, k: usize) -> Result<SetBounds> {
        check_k(k, self.topology.sigma())?;
        let pick = |f: &dyn Fn(&NodeResult) -> bool| {
            self.nodes.iter().filter(|r| f(r)).map(|r| r.node).collect::<Vec<_>>()
        };
        Ok(SetBounds {
            inner: pick(&|r| r.bounds.lo >= k),
            outer: pick(&|r| r.bounds.hi >= k),
        })
    }
}

impl NodeResult {
    fn new(node: usize, theorem: Omega, one_identifiable: bool) -> NodeResult {
        NodeResult {
            node,
            theorem,
            one_identifiable,
            csp: None,
            path_count: None,
            greedy_cover: None,
            min_cover: None,
            oracle: None,
            bounds: theorem.bounds,
            consistent: true,
        }
    }

    fn refine(&mut self, t: &Topology, options: AnalysisOptions) {
        let sigma = t.sigma();
        let mut extra = Vec::new();
        if options.fold_one {
            extra.push(if self.one_identifiable {
                IntBounds::new(1.min(sigma), sigma)
            } else {
                IntBounds::exact(0)
            });
        }
        if let Some(cover) = self.min_cover {
            let exact_cover = match self.theorem.rule {
                Rule::Unmonitored | Rule::DirectPath => self.theorem.bounds,
                _ => omega_from_cover(cover),
            };
            extra.push(exact_cover);
        }
        if let Some(v) = self.oracle {
            extra.push(IntBounds::exact(v));
        }
        let mut bounds = self.theorem.bounds;
        for b in extra {
            match bounds.intersect(b) {
                Some(next) => bounds = next,
                None => {
                    self.consistent = false;
                    self.bounds = self.theorem.bounds;
                    return;
                }
            }
        }
        self.bounds = bounds;
    }
}
