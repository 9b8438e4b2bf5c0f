use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use nodeloc::eval::{gen_er, place_monitors, run_batch, verify_topology, BatchSpec, Fault, Provenance};
use nodeloc::graph::parse_name_list;
use nodeloc::identifiability::{AnalysisOptions, Analyzer, Mechanism};
use nodeloc::oracle::{oracle_k_identifiable, oracle_msc, oracle_omega, oracle_omega_all, OracleLimits};
use nodeloc::paths::{enumerate_cap, enumerate_csp, route_up};
use nodeloc::{CcdfTable, EnumLimits, ExactCcdfTable, PathSet, Topology};

#[derive(Parser)]
#[command(name = "nodeloc", version, about = "Failure localization capability of monitor placements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a connected random graph with random monitors.
    Gen(GenArgs),
    /// Per-node bounds on the identifiability index.
    Analyze(AnalyzeArgs),
    /// Inner and outer bounds on the maximal k-identifiable sets.
    Maxset(MaxsetArgs),
    /// Fraction of nodes reaching each k, for one topology or a batch.
    Ccdf(CcdfArgs),
    /// Compare theory against exhaustive oracles.
    Verify(VerifyArgs),
    /// Exhaustive answers for small instances.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismArg {
    Cap,
    Csp,
    Up,
}

impl From<MechanismArg> for Mechanism {
    fn from(m: MechanismArg) -> Self {
        match m {
            MechanismArg::Cap => Mechanism::Cap,
            MechanismArg::Csp => Mechanism::Csp,
            MechanismArg::Up => Mechanism::Up,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct Input {
    /// Edge list file.
    #[arg(long)]
    topology: PathBuf,
    /// Monitor file, or an inline comma-separated list.
    #[arg(long)]
    monitors: Option<String>,
    /// Explicit measurement paths; analyzes them as fixed routing.
    #[arg(long)]
    paths: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct Limits {
    /// Oracle-tightened bounds (small instances only).
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = EnumLimits::default().max_nodes)]
    max_nodes: usize,
    #[arg(long, default_value_t = EnumLimits::default().max_edges)]
    max_edges: usize,
    #[arg(long, default_value_t = OracleLimits::default().max_sigma)]
    max_sigma: usize,
}

impl Limits {
    fn enumeration(&self) -> EnumLimits {
        EnumLimits {
            max_nodes: self.max_nodes,
            max_edges: self.max_edges,
        }
    }

    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            exact: self.exact,
            enumeration: self.enumeration(),
            oracle: OracleLimits {
                max_sigma: self.max_sigma,
            },
            ..AnalysisOptions::default()
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    nodes: usize,
    /// Edge probability.
    #[arg(long, short = 'p')]
    edge_probability: f64,
    /// Number of monitors.
    #[arg(long)]
    mu: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = nodeloc::eval::DEFAULT_MAX_RETRIES)]
    max_retries: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, value_delimiter = ',')]
    mechanism: Vec<MechanismArg>,
    /// Also report Ω of this node set, e.g. "v1,v2".
    #[arg(long)]
    set: Option<String>,
    /// With --set, also answer whether the set is k-identifiable.
    #[arg(long, requires = "set")]
    k: Option<usize>,
    #[command(flatten)]
    limits: Limits,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct MaxsetArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, value_delimiter = ',')]
    mechanism: Vec<MechanismArg>,
    /// Single k; all of 1..=σ when omitted.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    limits: Limits,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CcdfArgs {
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
    topology: Option<PathBuf>,
    #[arg(long)]
    monitors: Option<String>,
    #[arg(long)]
    paths: Option<PathBuf>,
    /// TOML batch spec; the table is averaged over its instances.
    #[arg(long)]
    batch: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    mechanism: Vec<MechanismArg>,
    /// Print exact fractions such as 3/4.
    #[arg(long)]
    rational: bool,
    #[command(flatten)]
    limits: Limits,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
    topology: Option<PathBuf>,
    #[arg(long)]
    monitors: Option<String>,
    #[arg(long)]
    batch: Option<PathBuf>,
    #[arg(long, default_value_t = EnumLimits::default().max_nodes)]
    max_nodes: usize,
    #[arg(long, default_value_t = EnumLimits::default().max_edges)]
    max_edges: usize,
    /// Corrupt a bound on purpose to check that failures are reported.
    #[arg(long, hide = true)]
    inject_fault: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    mechanism: Option<MechanismArg>,
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    limits: Limits,
    #[command(flatten)]
    output: Output,
}

/// Invalid flag combination detected after parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

enum Outcome {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<UsageError>() { 1 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let provenance = |command: &str, seed: Option<u64>| Provenance {
        command: command.to_owned(),
        seed,
        flags: std::env::args().skip(2).collect(),
    };
    match cli.command {
        Command::Gen(a) => {
            let er = gen_er(a.nodes, a.edge_probability, a.seed, a.max_retries)?;
            let t = place_monitors(&er.graph, a.mu, a.seed)?;
            eprintln!("connected after {} retries", er.retries);
            let text = format!(
                "# nodeloc gen nodes={} p={} mu={} seed={} retries={}\n{}",
                a.nodes,
                a.edge_probability,
                a.mu,
                a.seed,
                er.retries,
                t.to_edge_list()
            );
            emit(a.out.as_deref(), &text)?;
        }
        Command::Analyze(a) => {
            let t = load_topology(&a.input.topology, a.input.monitors.as_deref())?;
            let paths = load_paths(&t, a.input.paths.as_deref())?;
            let mechanisms = mechanisms(&a.mechanism, paths.is_some())?;
            let analyses = analyze(&t, &mechanisms, paths, a.limits.options())?;
            let set = a.set.as_deref().map(|s| parse_set(&t, s)).transpose()?;
            let report = nodeloc::eval::AnalysisReport::new(&analyses, set.as_deref(), a.k)?;
            let p = provenance("analyze", None);
            let text = match a.output.format {
                Format::Csv => report.to_csv(&p),
                Format::Json => report.to_json(&p),
            };
            emit(a.output.out.as_deref(), &text)?;
        }
        Command::Maxset(a) => {
            let t = load_topology(&a.input.topology, a.input.monitors.as_deref())?;
            let paths = load_paths(&t, a.input.paths.as_deref())?;
            let mechanisms = mechanisms(&a.mechanism, paths.is_some())?;
            let analyses = analyze(&t, &mechanisms, paths, a.limits.options())?;
            let ks: Vec<usize> = match a.k {
                Some(k) => vec![k],
                None => (1..=t.sigma()).collect(),
            };
            let names = |set: &[usize]| set.iter().map(|&v| t.name(v)).collect::<Vec<_>>().join(" ");
            let mut rows = Vec::new();
            for an in &analyses {
                for &k in &ks {
                    let s = an.max_identifiable_set(k)?;
                    rows.push((an.mechanism(), k, names(&s.inner), names(&s.outer), s.is_exact()));
                }
            }
            let p = provenance("maxset", None);
            let text = match a.output.format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["mechanism", "k", "inner", "outer", "exact"])?;
                    for (m, k, i, o, e) in &rows {
                        w.write_record([m.as_str(), &k.to_string(), i, o, &e.to_string()])?;
                    }
                    p.header() + &String::from_utf8(w.into_inner()?)?
                }
                Format::Json => {
                    let rows: Vec<_> = rows
                        .iter()
                        .map(|(m, k, i, o, e)| {
                            json!({"mechanism": m, "k": k, "inner": i, "outer": o, "exact": e})
                        })
                        .collect();
                    serde_json::to_string_pretty(&json!({"provenance": p, "rows": rows}))? + "\n"
                }
            };
            emit(a.output.out.as_deref(), &text)?;
        }
        Command::Ccdf(a) => {
            let options = a.limits.options();
            let (tables, seed) = if let Some(batch) = &a.batch {
                let spec = BatchSpec::parse(&read(batch)?)?;
                if a.paths.is_some() {
                    bail!(UsageError("--paths cannot be combined with --batch".into()));
                }
                let mechanisms = mechanisms(&a.mechanism, false)?;
                let tables = (0..spec.instances)
                    .into_par_iter()
                    .map(|i| {
                        let t = spec.instance(i)?;
                        let analyses = analyze(&t, &mechanisms, None, options)?;
                        Ok(ExactCcdfTable::from_analyses(&analyses)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                (tables, Some(spec.seed))
            } else {
                let topology = a.topology.as_deref().expect("required by clap");
                let t = load_topology(topology, a.monitors.as_deref())?;
                let paths = load_paths(&t, a.paths.as_deref())?;
                let mechanisms = mechanisms(&a.mechanism, paths.is_some())?;
                let analyses = analyze(&t, &mechanisms, paths, options)?;
                (vec![ExactCcdfTable::from_analyses(&analyses)?], None)
            };
            let exact = ExactCcdfTable::mean(&tables)?;
            let p = provenance("ccdf", seed);
            let text = if a.rational {
                match a.output.format {
                    Format::Csv => exact.to_csv(&p),
                    Format::Json => exact.to_json(&p),
                }
            } else {
                let float = to_float(&exact);
                match a.output.format {
                    Format::Csv => float.to_csv(&p),
                    Format::Json => float.to_json(&p),
                }
            };
            emit(a.output.out.as_deref(), &text)?;
        }
        Command::Verify(a) => {
            let limits = EnumLimits {
                max_nodes: a.max_nodes,
                max_edges: a.max_edges,
            };
            let fault = a.inject_fault.then_some(Fault::ShiftStarCut);
            let report = if let Some(batch) = &a.batch {
                let mut spec = BatchSpec::parse(&read(batch)?)?;
                spec.max_nodes.get_or_insert(limits.max_nodes);
                spec.max_edges.get_or_insert(limits.max_edges);
                run_batch(&spec, fault)
            } else {
                let path = a.topology.as_deref().expect("required by clap");
                let t = load_topology(path, a.monitors.as_deref())?;
                let r = verify_topology(&t, path.display().to_string(), limits, fault);
                nodeloc::eval::VerifyReport::from_instances(vec![r])
            };
            emit(a.out.as_deref(), &report.to_json())?;
            eprintln!(
                "{}: {} instances, {} checks, {} violations, {} errors",
                if report.passed { "PASS" } else { "FAIL" },
                report.instances,
                report.checks,
                report.violations,
                report.errors
            );
            if !report.passed {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Oracle(a) => {
            let t = load_topology(&a.input.topology, a.input.monitors.as_deref())?;
            let given = load_paths(&t, a.input.paths.as_deref())?;
            let mechanism = match (a.mechanism.map(Mechanism::from), given.is_some()) {
                (None | Some(Mechanism::Up), true) => Mechanism::Up,
                (Some(_), true) => bail!(UsageError("--paths implies --mechanism up".into())),
                (Some(m), false) => m,
                (None, false) => bail!(UsageError("--mechanism is required without --paths".into())),
            };
            let limits = a.limits.options();
            let paths = match (mechanism, given) {
                (_, Some(ps)) => ps,
                (Mechanism::Up, None) => route_up(&t),
                (Mechanism::Cap, None) => enumerate_cap(&t, limits.enumeration)?,
                (Mechanism::Csp, None) => enumerate_csp(&t, limits.enumeration)?,
            };
            let text = oracle_report(&t, &paths, mechanism, &a, limits.oracle)?;
            emit(a.output.out.as_deref(), &text)?;
        }
    }
    Ok(Outcome::Ok)
}

fn oracle_report(
    t: &Topology,
    paths: &PathSet,
    mechanism: Mechanism,
    a: &OracleArgs,
    limits: OracleLimits,
) -> Result<String> {
    let p = Provenance {
        command: "oracle".into(),
        seed: None,
        flags: std::env::args().skip(2).collect(),
    };
    if let Some(set) = &a.set {
        let s = parse_set(t, set)?;
        let value = match a.k {
            Some(k) => json!({"set": set, "k": k, "identifiable": oracle_k_identifiable(t, paths, &s, k, limits)?}),
            None => json!({"set": set, "omega": oracle_omega(t, paths, &s, limits)?}),
        };
        return Ok(match a.output.format {
            Format::Json => serde_json::to_string_pretty(&json!({"provenance": p, "result": value}))? + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let obj = value.as_object().expect("object");
                w.write_record(obj.keys())?;
                w.write_record(obj.values().map(|v| v.to_string().trim_matches('"').to_owned()))?;
                p.header() + &String::from_utf8(w.into_inner()?)?
            }
        });
    }
    let omega = oracle_omega_all(t, paths, limits)?;
    let mut rows = Vec::new();
    for (i, &v) in t.non_monitors().iter().enumerate() {
        let msc = match mechanism {
            Mechanism::Up => Some(oracle_msc(t, v, paths, limits)?),
            _ => None,
        };
        rows.push((t.name(v).to_owned(), omega[i], msc));
    }
    Ok(match a.output.format {
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(n, o, m)| json!({"node": n, "omega": o, "min_cover": m}))
                .collect();
            serde_json::to_string_pretty(&json!({"provenance": p, "mechanism": mechanism, "rows": rows}))? + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["node", "omega", "min_cover"])?;
            for (n, o, m) in &rows {
                w.write_record([n.clone(), o.to_string(), m.map_or_else(String::new, |x| x.to_string())])?;
            }
            p.header() + &String::from_utf8(w.into_inner()?)?
        }
    })
}

fn to_float(table: &ExactCcdfTable) -> CcdfTable {
    use num_traits::ToPrimitive;
    let f = |v: &[num_rational::Ratio<u64>]| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    CcdfTable {
        max_k: table.max_k,
        columns: table
            .columns
            .iter()
            .map(|c| nodeloc::eval::CcdfColumn {
                mechanism: c.mechanism,
                inner: f(&c.inner),
                outer: f(&c.outer),
            })
            .collect(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_topology(path: &Path, monitors: Option<&str>) -> Result<Topology> {
    let monitors = match monitors {
        Some(m) if Path::new(m).is_file() => Some(parse_name_list(&read(Path::new(m))?)),
        Some(m) => Some(parse_name_list(m)),
        None => None,
    };
    Topology::load(&read(path)?, monitors.as_deref()).with_context(|| format!("loading {}", path.display()))
}

fn load_paths(t: &Topology, path: Option<&Path>) -> Result<Option<PathSet>> {
    path.map(|p| PathSet::parse(t, &read(p)?).with_context(|| format!("loading {}", p.display())))
        .transpose()
}

fn parse_set(t: &Topology, text: &str) -> Result<Vec<usize>> {
    let names = parse_name_list(text);
    if names.is_empty() {
        bail!(UsageError("--set needs at least one node".into()));
    }
    Ok(t.non_monitor_set(&names)?)
}

fn mechanisms(args: &[MechanismArg], explicit_paths: bool) -> Result<Vec<Mechanism>> {
    let mut list: Vec<Mechanism> = args.iter().map(|&m| m.into()).collect();
    if list.is_empty() {
        list = if explicit_paths {
            vec![Mechanism::Up]
        } else {
            Mechanism::ALL.to_vec()
        };
    }
    list.dedup();
    if explicit_paths && list != [Mechanism::Up] {
        bail!(UsageError("--paths implies --mechanism up".into()));
    }
    Ok(list)
}

fn analyze<'t>(
    t: &'t Topology,
    mechanisms: &[Mechanism],
    paths: Option<PathSet>,
    options: AnalysisOptions,
) -> Result<Vec<Analyzer<'t>>> {
    Ok(mechanisms
        .iter()
        .map(|&m| Analyzer::new(t, m, if m == Mechanism::Up { paths.clone() } else { None }, options))
        .collect::<nodeloc::Result<_>>()?)
}
