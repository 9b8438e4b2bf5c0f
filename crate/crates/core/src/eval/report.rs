//! Per-node reports and CCDF tables in CSV and JSON.

use std::cmp::Reverse;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::identifiability::{Analyzer, IntBounds, Mechanism, TriState};
use crate::scalar::Fraction;

/// CSV layout version written into every header comment.
pub const SCHEMA_VERSION: u32 = 1;

/// What produced a report, echoed as a comment line at the top of each CSV.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub command: String,
    pub seed: Option<u64>,
    pub flags: Vec<String>,
}

impl Provenance {
    pub fn header(&self) -> String {
        let seed = self.seed.map_or_else(|| "-".to_owned(), |s| s.to_string());
        format!(
            "# nodeloc {} schema={} command={} seed={} flags={}\n",
            env!("CARGO_PKG_VERSION"),
            SCHEMA_VERSION,
            self.command,
            seed,
            self.flags.join(" ")
        )
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub node: String,
    pub degree: usize,
    pub monitor_degree: usize,
    pub non_monitor_degree: usize,
    /// One entry per report mechanism.
    pub omega: Vec<IntBounds>,
    /// Exact values, present when the analysis ran with oracles.
    pub oracle: Vec<Option<usize>>,
}

/// Bounds on Ω of a queried node set, one entry per mechanism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetRow {
    pub nodes: Vec<String>,
    pub omega: Vec<IntBounds>,
    /// The queried k and one k-identifiability answer per mechanism.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub answers: Vec<TriState>,
}

/// Per-node comparison of Ω across mechanisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub mechanisms: Vec<Mechanism>,
    pub exact: bool,
    pub rows: Vec<ReportRow>,
    pub set: Option<SetRow>,
}

impl AnalysisReport {
    /// Builds a report from analyses of the same topology. Rows are sorted by
    /// the first mechanism's bounds, largest first, then by name. A `k`
    /// adds k-identifiability answers for `set`.
    pub fn new(
        analyses: &[Analyzer<'_>],
        set: Option<&[usize]>,
        k: Option<usize>,
    ) -> Result<AnalysisReport> {
        let first = analyses
            .first()
            .ok_or_else(|| Error::InvalidParameter("no mechanism selected".into()))?;
        let t = first.topology();
        let exact = analyses.iter().all(|a| a.options().exact);
        let mut rows: Vec<ReportRow> = t
            .non_monitors()
            .iter()
            .enumerate()
            .map(|(i, &v)| ReportRow {
                node: t.name(v).to_owned(),
                degree: t.degree(v),
                monitor_degree: t.monitor_degree(v),
                non_monitor_degree: t.non_monitor_degree(v),
                omega: analyses.iter().map(|a| a.nodes()[i].bounds).collect(),
                oracle: analyses.iter().map(|a| a.nodes()[i].oracle).collect(),
            })
            .collect();
        rows.sort_by_key(|r| (Reverse(r.omega[0].hi), Reverse(r.omega[0].lo), r.node.clone()));
        let set = match set {
            Some(s) => Some(SetRow {
                nodes: s.iter().map(|&v| t.name(v).to_owned()).collect(),
                omega: analyses
                    .iter()
                    .map(|a| a.omega_set(s))
                    .collect::<Result<_>>()?,
                k,
                answers: match k {
                    Some(k) => analyses
                        .iter()
                        .map(|a| a.k_identifiable(s, k))
                        .collect::<Result<_>>()?,
                    None => Vec::new(),
                },
            }),
            None => None,
        };
        Ok(AnalysisReport {
            mechanisms: analyses.iter().map(|a| a.mechanism()).collect(),
            exact,
            rows,
            set,
        })
    }

    pub fn to_csv(&self, provenance: &Provenance) -> String {
        let mut header: Vec<String> = ["node", "degree", "monitor_degree", "non_monitor_degree"]
            .map(String::from)
            .to_vec();
        for m in &self.mechanisms {
            header.push(format!("{m}_lo"));
            header.push(format!("{m}_hi"));
            if self.exact {
                header.push(format!("{m}_oracle"));
            }
        }
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![
                    r.node.clone(),
                    r.degree.to_string(),
                    r.monitor_degree.to_string(),
                    r.non_monitor_degree.to_string(),
                ];
                for (b, o) in r.omega.iter().zip(&r.oracle) {
                    row.push(b.lo.to_string());
                    row.push(b.hi.to_string());
                    if self.exact {
                        row.push(o.map_or_else(String::new, |v| v.to_string()));
                    }
                }
                row
            })
            .collect();
        let mut out = provenance.header();
        if let Some(set) = &self.set {
            out.push_str(&format!("# set {}:", set.nodes.join(",")));
            for (m, b) in self.mechanisms.iter().zip(&set.omega) {
                out.push_str(&format!(" {m}={b}"));
            }
            out.push('\n');
            if let Some(k) = set.k {
                out.push_str(&format!("# set {} k={k}:", set.nodes.join(",")));
                for (m, a) in self.mechanisms.iter().zip(&set.answers) {
                    out.push_str(&format!(" {m}={a}"));
                }
                out.push('\n');
            }
        }
        out + &csv_text(&header, &rows)
    }

    pub fn to_json(&self, provenance: &Provenance) -> String {
        let value = json!({ "provenance": provenance, "report": self });
        serde_json::to_string_pretty(&value).expect("serializable") + "\n"
    }
}

/// Inner and outer CCDF values for one mechanism, indexed by `k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfColumn<T> {
    pub mechanism: Mechanism,
    pub inner: Vec<T>,
    pub outer: Vec<T>,
}

/// Fraction of non-monitors whose Ω can reach `k`, for `k = 1..=max_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfTableOf<T> {
    pub max_k: usize,
    pub columns: Vec<CcdfColumn<T>>,
}

impl<T: Fraction> CcdfTableOf<T> {
    /// Table for one topology from its per-mechanism analyses, `max_k = σ`.
    pub fn from_analyses(analyses: &[Analyzer<'_>]) -> Result<CcdfTableOf<T>> {
        let sigma = analyses.first().map_or(0, |a| a.topology().sigma());
        let columns = analyses
            .iter()
            .map(|a| {
                let mut inner = Vec::with_capacity(sigma);
                let mut outer = Vec::with_capacity(sigma);
                for k in 1..=sigma {
                    let s = a.max_identifiable_set(k)?;
                    inner.push(T::ratio(s.inner.len(), sigma));
                    outer.push(T::ratio(s.outer.len(), sigma));
                }
                Ok(CcdfColumn {
                    mechanism: a.mechanism(),
                    inner,
                    outer,
                })
            })
            .collect::<Result<_>>()?;
        Ok(CcdfTableOf { max_k: sigma, columns })
    }

    /// Pointwise mean over tables, truncated to the smallest `max_k`.
    pub fn mean(tables: &[CcdfTableOf<T>]) -> Result<CcdfTableOf<T>> {
        let first = tables
            .first()
            .ok_or_else(|| Error::InvalidParameter("no tables to average".into()))?;
        let max_k = tables.iter().map(|t| t.max_k).min().unwrap_or(0);
        let mut columns = Vec::new();
        for (c, col) in first.columns.iter().enumerate() {
            let mut inner = Vec::with_capacity(max_k);
            let mut outer = Vec::with_capacity(max_k);
            for k in 0..max_k {
                let pick = |f: &dyn Fn(&CcdfColumn<T>) -> T| -> Result<Vec<T>> {
                    tables
                        .iter()
                        .map(|t| match t.columns.get(c) {
                            Some(other) if other.mechanism == col.mechanism => Ok(f(other)),
                            _ => Err(Error::InvalidParameter("mismatched mechanisms".into())),
                        })
                        .collect()
                };
                inner.push(T::mean(&pick(&|x| x.inner[k])?));
                outer.push(T::mean(&pick(&|x| x.outer[k])?));
            }
            columns.push(CcdfColumn {
                mechanism: col.mechanism,
                inner,
                outer,
            });
        }
        Ok(CcdfTableOf { max_k, columns })
    }

    pub fn column(&self, mechanism: Mechanism) -> Option<&CcdfColumn<T>> {
        self.columns.iter().find(|c| c.mechanism == mechanism)
    }

    /// Whether every column is non-increasing in `k` and inside `[0, 1]`.
    pub fn is_well_formed(&self) -> bool {
        let ok = |v: &[T]| {
            v.iter().all(|&x| x >= T::zero() && x <= T::one()) && v.windows(2).all(|w| w[1] <= w[0])
        };
        self.columns
            .iter()
            .all(|c| ok(&c.inner) && ok(&c.outer) && c.inner.iter().zip(&c.outer).all(|(i, o)| i <= o))
    }

    pub fn to_csv(&self, provenance: &Provenance) -> String {
        let mut header = vec!["k".to_owned()];
        for c in &self.columns {
            header.push(format!("{}_inner", c.mechanism));
            header.push(format!("{}_outer", c.mechanism));
        }
        let rows: Vec<Vec<String>> = (0..self.max_k)
            .map(|k| {
                let mut row = vec![(k + 1).to_string()];
                for c in &self.columns {
                    row.push(c.inner[k].to_string());
                    row.push(c.outer[k].to_string());
                }
                row
            })
            .collect();
        provenance.header() + &csv_text(&header, &rows)
    }

    pub fn to_json(&self, provenance: &Provenance) -> String {
        let num = |x: &T| Value::from(x.to_f64().unwrap_or(f64::NAN));
        let rows: Vec<Value> = (0..self.max_k)
            .map(|k| {
                let mut row = serde_json::Map::new();
                row.insert("k".into(), Value::from(k + 1));
                for c in &self.columns {
                    row.insert(format!("{}_inner", c.mechanism), num(&c.inner[k]));
                    row.insert(format!("{}_outer", c.mechanism), num(&c.outer[k]));
                }
                Value::Object(row)
            })
            .collect();
        let value = json!({ "provenance": provenance, "rows": rows });
        serde_json::to_string_pretty(&value).expect("serializable") + "\n"
    }
}
