//! Oracle-versus-theory comparisons for single topologies and seeded batches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::generate::{gen_er, place_monitors, DEFAULT_MAX_RETRIES};
use crate::graph::Topology;
use crate::identifiability::{
    direct_path_set, sigma_minus_one_set_csp, sigma_set_csp, AnalysisOptions, Analyzer, IntBounds,
    Mechanism, NodeResult, Rule,
};
use crate::paths::EnumLimits;

/// Declarative batch of random instances. Instance `i` uses
/// `node_counts[i % len]`, `monitor_counts[i % len]` and seed `seed + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSpec {
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    pub node_counts: Vec<usize>,
    pub edge_probability: f64,
    pub monitor_counts: Vec<usize>,
    #[serde(default)]
    pub max_edges: Option<usize>,
    #[serde(default)]
    pub max_nodes: Option<usize>,
}

impl BatchSpec {
    pub fn parse(text: &str) -> Result<BatchSpec> {
        let spec: BatchSpec = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_owned(),
        })?;
        if spec.node_counts.is_empty() || spec.monitor_counts.is_empty() {
            return Err(Error::InvalidParameter(
                "node_counts and monitor_counts must be non-empty".into(),
            ));
        }
        Ok(spec)
    }

    pub fn enumeration(&self) -> EnumLimits {
        let d = EnumLimits::default();
        EnumLimits {
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
            max_edges: self.max_edges.unwrap_or(d.max_edges),
        }
    }

    /// Generates instance `i`.
    pub fn instance(&self, i: usize) -> Result<Topology> {
        let n = self.node_counts[i % self.node_counts.len()];
        let mu = self.monitor_counts[i % self.monitor_counts.len()];
        let seed = self.seed.wrapping_add(i as u64);
        let g = gen_er(n, self.edge_probability, seed, DEFAULT_MAX_RETRIES)?.graph;
        place_monitors(&g, mu, seed)
    }
}

/// Deliberate corruption used to check that the harness detects failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Raises every star-cut value by one before comparison.
    ShiftStarCut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub mechanism: Mechanism,
    pub node: Option<String>,
    pub check: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub label: String,
    pub nodes: usize,
    pub edges: usize,
    pub monitors: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
    /// Cap or other errors that prevented the comparison.
    pub errors: Vec<String>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.errors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub instances: usize,
    pub checks: usize,
    pub violations: usize,
    pub errors: usize,
    pub passed: bool,
    pub failures: Vec<InstanceReport>,
}

impl VerifyReport {
    pub fn from_instances(reports: Vec<InstanceReport>) -> VerifyReport {
        let checks = reports.iter().map(|r| r.checks).sum();
        let violations = reports.iter().map(|r| r.violations.len()).sum();
        let errors = reports.iter().map(|r| r.errors.len()).sum();
        let instances = reports.len();
        let failures: Vec<InstanceReport> = reports.into_iter().filter(|r| !r.passed()).collect();
        VerifyReport {
            instances,
            checks,
            violations,
            errors,
            passed: failures.is_empty(),
            failures,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

struct Checker<'a> {
    t: &'a Topology,
    mechanism: Mechanism,
    checks: usize,
    violations: Vec<Violation>,
}

impl Checker<'_> {
    fn expect(&mut self, ok: bool, node: Option<usize>, check: &'static str, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(Violation {
                mechanism: self.mechanism,
                node: node.map(|v| self.t.name(v).to_owned()),
                check,
                detail: detail(),
            });
        }
    }

    fn sets(&mut self, check: &'static str, got: Vec<usize>, oracle: Vec<usize>) {
        self.expect(got == oracle, None, check, || format!("theory {got:?}, oracle {oracle:?}"));
    }
}

fn oracle_set(nodes: &[NodeResult], k: usize) -> Vec<usize> {
    nodes
        .iter()
        .filter(|r| r.oracle.expect("exact analysis") >= k)
        .map(|r| r.node)
        .collect()
}

fn check_mechanism(
    t: &Topology,
    mechanism: Mechanism,
    enumeration: EnumLimits,
    fault: Option<Fault>,
) -> Result<(usize, Vec<Violation>)> {
    let options = AnalysisOptions {
        exact: true,
        fold_one: false,
        enumeration,
        ..AnalysisOptions::default()
    };
    let analysis = Analyzer::new(t, mechanism, None, options)?;
    let mut c = Checker {
        t,
        mechanism,
        checks: 0,
        violations: Vec::new(),
    };
    let sigma = t.sigma();
    for r in analysis.nodes() {
        let v = r.node;
        let omega = r.oracle.expect("exact analysis");
        let mut theorem = r.theorem.bounds;
        if mechanism == Mechanism::Cap && fault == Some(Fault::ShiftStarCut) {
            theorem = IntBounds::exact(theorem.lo + 1);
        }
        c.expect(theorem.contains(omega), Some(v), "bounds-contain-oracle", || {
            format!("bounds {theorem}, oracle {omega}")
        });
        c.expect(r.one_identifiable == (omega >= 1), Some(v), "one-identifiability", || {
            format!("test says {}, oracle {omega}", r.one_identifiable)
        });
        match mechanism {
            Mechanism::Cap => {
                c.expect(theorem.is_exact(), Some(v), "cap-exact", || theorem.to_string());
            }
            Mechanism::Csp => {
                let limit = if r.theorem.rule == Rule::CutGap { 1 } else { 0 };
                c.expect(theorem.hi - theorem.lo <= limit, Some(v), "csp-width", || {
                    format!("{theorem} under {}", r.theorem.rule)
                });
                let i = r.csp.expect("csp internals");
                c.expect(i.delta_min <= i.delta_star, Some(v), "csp-cut-order", || {
                    format!("{} > {}", i.delta_min, i.delta_star)
                });
            }
            Mechanism::Up => {
                let msc = r.min_cover.expect("exact analysis");
                let gsc = r.greedy_cover.expect("fixed routing");
                let count = r.path_count.expect("fixed routing");
                let cover = match r.theorem.rule {
                    Rule::Unmonitored | Rule::DirectPath => theorem,
                    _ => IntBounds::new(msc.saturating_sub(1), msc),
                };
                c.expect(cover.contains(omega), Some(v), "cover-contains-oracle", || {
                    format!("min cover {msc}, oracle {omega}")
                });
                let ceiling = ((count.max(1) as f64).ln() + 1.0) * msc as f64;
                c.expect(
                    msc <= gsc && gsc as f64 <= ceiling.ceil() + 1e-9,
                    Some(v),
                    "greedy-ratio",
                    || format!("msc {msc}, gsc {gsc}, |P_v| {count}"),
                );
            }
        }
    }
    if sigma >= 1 {
        let top = oracle_set(analysis.nodes(), sigma);
        match mechanism {
            Mechanism::Csp => c.sets("csp-sigma-set", sigma_set_csp(t), top),
            Mechanism::Up => {
                let paths = analysis.paths().expect("fixed routing");
                c.sets("up-sigma-set", direct_path_set(t, paths), top)
            }
            Mechanism::Cap => {}
        }
    }
    if sigma >= 2 && mechanism == Mechanism::Csp {
        let next = oracle_set(analysis.nodes(), sigma - 1);
        c.sets("csp-sigma-minus-one-set", sigma_minus_one_set_csp(t), next);
    }
    Ok((c.checks, c.violations))
}

/// Compares theorem-based results with the exhaustive oracles on `t` under
/// every mechanism.
pub fn verify_topology(
    t: &Topology,
    label: impl Into<String>,
    enumeration: EnumLimits,
    fault: Option<Fault>,
) -> InstanceReport {
    let mut report = InstanceReport {
        label: label.into(),
        nodes: t.node_count(),
        edges: t.xi(),
        monitors: t.mu(),
        checks: 0,
        violations: Vec::new(),
        errors: Vec::new(),
    };
    for m in Mechanism::ALL {
        match check_mechanism(t, m, enumeration, fault) {
            Ok((checks, violations)) => {
                report.checks += checks;
                report.violations.extend(violations);
            }
            Err(e) => report.errors.push(format!("{m}: {e}")),
        }
    }
    report
}

/// Runs every instance of `spec` in parallel.
pub fn run_batch(spec: &BatchSpec, fault: Option<Fault>) -> VerifyReport {
    let limits = spec.enumeration();
    let reports = (0..spec.instances)
        .into_par_iter()
        .map(|i| {
            let label = format!("instance {i} (seed {})", spec.seed.wrapping_add(i as u64));
            match spec.instance(i) {
                Ok(t) => verify_topology(&t, label, limits, fault),
                Err(e) => InstanceReport {
                    label,
                    nodes: 0,
                    edges: 0,
                    monitors: 0,
                    checks: 0,
                    violations: Vec::new(),
                    errors: vec![e.to_string()],
                },
            }
        })
        .collect();
    VerifyReport::from_instances(reports)
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
    fn sample_passes_and_fault_is_caught() {
        let t = Topology::load(SAMPLE, None).unwrap();
        let ok = verify_topology(&t, "sample", EnumLimits::default(), None);
        assert!(ok.passed(), "{ok:?}");
        let bad = verify_topology(&t, "sample", EnumLimits::default(), Some(Fault::ShiftStarCut));
        assert!(!bad.passed());
    }

    #[test]
    fn batch_spec_parsing() {
        let spec = BatchSpec::parse(
            "instances = 4\nseed = 11\nnode_counts = [6, 7]\nedge_probability = 0.4\nmonitor_counts = [2, 3]\n",
        )
        .unwrap();
        assert_eq!(spec.instances, 4);
        let report = run_batch(&spec, None);
        assert_eq!(report.instances, 4);
        assert!(report.passed, "{report:?}");
        assert!(BatchSpec::parse("instances = 1\nbogus = 2\n").is_err());
    }

    #[test]
    fn caps_are_failures() {
        let spec = BatchSpec {
            instances: 1,
            seed: 0,
            node_counts: vec![9],
            edge_probability: 0.9,
            monitor_counts: vec![2],
            max_edges: Some(5),
            max_nodes: None,
        };
        let report = run_batch(&spec, None);
        assert!(!report.passed);
        assert!(report.errors > 0);
    }
}
