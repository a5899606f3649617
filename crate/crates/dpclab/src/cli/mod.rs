//! The `dpclab` command line: argument parsing, input loading and one
//! renderer per verb. [`run`] never exits the process; it returns the exit
//! status (0 success, 1 failed check, 2 usage or input error).

pub mod corpus;
pub mod report;
pub mod suites;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bounds::{e_constant, g_lower, ig_transform, AlgebraMode, BoundsError};
use crate::dp::{
    dependency_pairs, estimated_dependency_graph, usable_rules, usable_rules_checked, witnessed_edges,
    ArgumentFiltering, DpError, DpProblem, Filter,
};
use crate::progeny::{progenitor_graph, ProgenyError};
use crate::rewrite::{
    derive, empirical_complexity, parse_trace, write_trace, ComplexityMode, Derivation, HeightCache, RewriteError,
    Strategy, DEFAULT_BUDGET,
};
use crate::simtrs::{f_constant, f_for_terms, f_linear, Fast, SccHeights, SimContext, SimError, SimParams, SimSystem};
use crate::term::{parse_term, parse_trs, sym, Term, TermError, Trs};
use corpus::{builtin, builtin_examples, bundled_trace, AlgebraSpec, Example, Target};
use report::{all_pass, rows_csv, rows_json, rows_text, table_csv};
use suites::{run_all, run_suite, SuiteConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Progeny(#[from] ProgenyError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// derivational complexity
    Dc,
    /// dependency pair complexity
    Dp,
    /// maximum over SCCs
    Scc,
}

#[derive(Debug, Parser)]
#[command(name = "dpclab", version, about = "Dependency pair complexity laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, clap::Args)]
pub struct Opts {
    /// Builtin example name (Ra, Rb, Rnonll, Rd, Re, Rde, Rebin, Rl, Rack) or a TRS file
    #[arg(long, global = true, value_name = "NAME|FILE")]
    pub example: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Maximal number of terms explored by exhaustive searches
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Largest term size for enumerations, random start terms and witness searches
    #[arg(long, global = true, value_name = "N")]
    pub max_size: Option<usize>,
    /// Number of seeded random derivations or terms
    #[arg(long, global = true, value_name = "N")]
    pub random: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// The l of Rl
    #[arg(long, global = true, value_name = "N")]
    pub param: Option<usize>,
    /// li, lo or trace:FILE
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Sampling grid 0..=N for non-linear algebras
    #[arg(long, global = true, value_name = "N")]
    pub grid: Option<usize>,
    /// Trace file; bundled traces are found by file name
    #[arg(long, global = true, value_name = "FILE")]
    pub trace: Option<String>,
    /// Ground term to start from
    #[arg(long, global = true)]
    pub term: Option<String>,
    /// Argument filtering, e.g. "f=1 i=[1] ∘#=[1,2]"
    #[arg(long, global = true, value_name = "SPEC")]
    pub filter: Option<String>,
    /// Algebra file for the algebra suite
    #[arg(long, global = true, value_name = "FILE")]
    pub algebra: Option<PathBuf>,
    /// What an --algebra file has to orient: pairs over rules, pairs over usable rules, or rules
    #[arg(long, global = true, value_enum, default_value_t = Orient::Rules)]
    pub orient: Orient,
    /// f of the simulating system: auto, const:N or linear:A,B (A·n+B); auto is the
    /// constant at the largest SCC height among the simulated terms
    #[arg(long = "sim-f", global = true, value_name = "SPEC", default_value = "auto")]
    pub sim_f: String,
    /// Step limit for derive
    #[arg(long, global = true, value_name = "N", default_value_t = 1000)]
    pub steps: usize,
    /// Complexity measure for measure
    #[arg(long, global = true, value_enum, default_value_t = Mode::Dc)]
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Orient {
    Pairs,
    Usable,
    Rules,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Print the system, or replay a trace against it
    Parse,
    /// List the dependency pairs
    Dp,
    /// Apply an argument filtering to the pairs and rules
    Filter,
    /// Estimated dependency graph with SCCs and ranks
    Graph,
    /// Usable rules of the pairs
    Usable,
    /// Rewrite a term with a strategy
    Derive,
    /// Progenitor graph of a derivation
    Pgraph,
    /// I_G image of a term and its size bound
    Ig,
    /// Empirical complexity table
    Measure,
    /// Run a check suite
    Check {
        /// all, traces, progeny, rank, depth, srs, filter, graph, complexity, algebra, ig, sim, seed, chain, ackermann, g, fast
        suite: String,
    },
    /// Print the simulating system
    Simgen,
    /// Simulate a derivation, or seed a term, in the simulating system
    Simulate,
    /// Evaluate F_n(m) for the parameter --param (default 2)
    Fast { n: usize, m: u64 },
}

/// Parses `args` (including the program name), runs the verb and writes to
/// `out`/`err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(err, "dpclab: {line}");
            return 2;
        }
    };
    match execute(&cli) {
        Ok(Output { text, ok }) => {
            let _ = out.write_all(text.as_bytes());
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let msg = e.to_string();
            let _ = writeln!(err, "dpclab: {}", msg.lines().next().unwrap_or(""));
            2
        }
    }
}

struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, ok: true }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// A builtin by name, otherwise a TRS file.
pub fn load_example(spec: &str, param: Option<usize>) -> Result<Example, CliError> {
    if let Some(ex) = builtin(spec, param) {
        return Ok(ex);
    }
    if corpus::NAMES.contains(&spec) {
        return Err(CliError::Usage(format!("{spec} needs --param of at least 2")));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "unknown example `{spec}` (builtins: {}; or a TRS file)",
            corpus::NAMES.join(", ")
        )));
    }
    let trs = parse_trs(&read(path)?)?;
    let name = path.file_stem().map_or(spec.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Example { name, trs, traces: Vec::new(), filter: None, algebras: Vec::new() })
}

/// A trace file, or a bundled trace with the same file name.
pub fn load_trace(trs: &Trs, spec: &str) -> Result<Derivation, CliError> {
    let path = Path::new(spec);
    let text = if path.exists() {
        read(path)?
    } else {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match bundled_trace(&name) {
            Some((_, t)) => t.to_string(),
            None => return Err(CliError::Io { path: spec.into(), source: std::io::ErrorKind::NotFound.into() }),
        }
    };
    Ok(parse_trace(trs, &text)?)
}

/// `"f=1 i=[1] ∘=[1,2]"`, entries separated by whitespace or `;`.
pub fn parse_filter(spec: &str, dp: &DpProblem) -> Result<ArgumentFiltering, CliError> {
    let bad = |e: &str| CliError::Usage(format!("bad filter entry `{e}` (expected f=i or f=[i,...])"));
    let mut entries = Vec::new();
    for e in spec.split(|c: char| c.is_whitespace() || c == ';').filter(|e| !e.is_empty()) {
        let (f, v) = e.split_once('=').ok_or_else(|| bad(e))?;
        let filter = if let Some(list) = v.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
            let ix = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse().map_err(|_| bad(e)))
                .collect::<Result<Vec<usize>, _>>()?;
            Filter::Keep(ix)
        } else {
            Filter::Collapse(v.trim().parse().map_err(|_| bad(e))?)
        };
        entries.push((sym(f.trim()), filter));
    }
    let mut sig = dp.base.signature().clone();
    sig.extend(dp.marked_signature.iter().map(|(f, n)| (f.clone(), *n)));
    Ok(ArgumentFiltering::new(entries, &sig)?)
}

/// `None` for `auto`.
fn parse_sim_f(spec: &str) -> Result<Option<Trs>, CliError> {
    let bad = || CliError::Usage(format!("bad --sim-f `{spec}` (expected auto, const:N or linear:A,B)"));
    if spec == "auto" {
        return Ok(None);
    }
    if let Some(n) = spec.strip_prefix("const:") {
        return Ok(Some(f_constant(n.trim().parse().map_err(|_| bad())?)));
    }
    if let Some(ab) = spec.strip_prefix("linear:") {
        let (a, b) = ab.split_once(',').ok_or_else(bad)?;
        return Ok(Some(f_linear(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)));
    }
    Err(bad())
}

/// The requested `f`, or the automatic one for `terms`.
fn sim_f<'a>(spec: Option<Trs>, trs: &Trs, terms: impl IntoIterator<Item = &'a Term>, budget: usize) -> Result<Trs, CliError> {
    match spec {
        Some(f) => Ok(f),
        None => Ok(f_for_terms(&mut SccHeights::new(trs, budget), terms)?),
    }
}

fn unsupported(verb: &str, f: Format) -> CliError {
    CliError::Usage(format!("format {f:?} is not available for {verb}").to_lowercase())
}

fn json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

struct Ctx<'a> {
    opts: &'a Opts,
}

impl Ctx<'_> {
    fn example(&self) -> Result<Example, CliError> {
        let spec = self.opts.example.as_deref().ok_or_else(|| CliError::Usage("no input: pass --example NAME|FILE".into()))?;
        load_example(spec, self.opts.param)
    }

    fn term(&self, trs: &Trs) -> Result<Term, CliError> {
        let text = self.opts.term.as_deref().ok_or_else(|| CliError::Usage("pass --term TERM".into()))?;
        let t = parse_term(text, &[])?;
        trs.check_term(&t)?;
        Ok(t)
    }

    /// `--trace`, `--strategy trace:FILE`, or `--term` under `--strategy li|lo`.
    fn derivation(&self, trs: &Trs) -> Result<Derivation, CliError> {
        let strategy = self.opts.strategy.as_deref();
        if let Some(file) = strategy.and_then(|s| s.strip_prefix("trace:")) {
            return load_trace(trs, file);
        }
        if let Some(file) = &self.opts.trace {
            return load_trace(trs, file);
        }
        let s = match strategy.unwrap_or("li") {
            "li" => Strategy::LeftmostInnermost,
            "lo" => Strategy::LeftmostOutermost,
            other => return Err(CliError::Usage(format!("unknown strategy `{other}` (expected li, lo or trace:FILE)"))),
        };
        Ok(derive(trs, &self.term(trs)?, s, self.opts.steps))
    }

    fn has_derivation(&self) -> bool {
        self.opts.trace.is_some() || self.opts.strategy.as_deref().is_some_and(|s| s.starts_with("trace:"))
    }

    fn format(&self, verb: &str, allowed: &[Format]) -> Result<Format, CliError> {
        let f = self.opts.format;
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(unsupported(verb, f))
        }
    }
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let ctx = Ctx { opts: &cli.opts };
    use Format::*;
    match &cli.verb {
        Verb::Parse => {
            let ex = ctx.example()?;
            let d = if ctx.has_derivation() { Some(ctx.derivation(&ex.trs)?) } else { None };
            match ctx.format("parse", &[Text, Json])? {
                Json => {
                    let mut v = serde_json::json!({
                        "name": ex.name,
                        "rules": ex.trs.rules().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                        "signature": ex.trs.signature().iter().map(|(f, n)| (f.to_string(), *n)).collect::<BTreeMap<_, _>>(),
                        "traces": ex.traces.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
                    });
                    if let Some(d) = &d {
                        v["trace_steps"] = d.len().into();
                    }
                    Ok(Output::ok(json(&v)))
                }
                _ => {
                    let mut s = ex.trs.to_text();
                    let sig: Vec<String> = ex.trs.signature().iter().map(|(f, n)| format!("{f}/{n}")).collect();
                    let _ = writeln!(s, "% {}: {} rules; signature {}", ex.name, ex.trs.len(), sig.join(" "));
                    if let Some(d) = &d {
                        let _ = writeln!(s, "% trace replays: {} steps", d.len());
                    }
                    Ok(Output::ok(s))
                }
            }
        }
        Verb::Dp => {
            let ex = ctx.example()?;
            let dp = dependency_pairs(&ex.trs);
            let rows: Vec<Vec<String>> = dp
                .pairs
                .iter()
                .zip(&dp.origins)
                .enumerate()
                .map(|(i, (p, (r, pos)))| {
                    vec![(i + 1).to_string(), p.lhs.to_string(), p.rhs.to_string(), (r + 1).to_string(), pos.to_string()]
                })
                .collect();
            let header = ["pair", "lhs", "rhs", "rule", "position"];
            Ok(Output::ok(match ctx.format("dp", &[Text, Json, Csv])? {
                Json => json(&serde_json::json!({
                    "pairs": rows.iter().map(|r| serde_json::json!({
                        "lhs": r[1], "rhs": r[2], "rule": r[3].parse::<usize>().expect("number"), "position": r[4],
                    })).collect::<Vec<_>>()
                })),
                Csv => table_csv(&header, &rows),
                _ => {
                    let mut s = String::new();
                    for r in &rows {
                        let _ = writeln!(s, "{}: {} -> {}   (rule {}, position {})", r[0], r[1], r[2], r[3], if r[4].is_empty() { "ε" } else { &r[4] });
                    }
                    let _ = writeln!(s, "{} dependency pairs", rows.len());
                    s
                }
            }))
        }
        Verb::Filter => {
            let ex = ctx.example()?;
            let dp = dependency_pairs(&ex.trs);
            let spec = ctx.opts.filter.as_deref().or(ex.filter).ok_or_else(|| CliError::Usage(format!("no argument filtering for {}; pass --filter", ex.name)))?;
            let pi = parse_filter(spec, &dp)?;
            let fp = pi.problem(&dp)?;
            let pairs: Vec<String> = fp.pairs.iter().map(|r| r.to_string()).collect();
            let rules: Vec<String> = fp.rules.iter().map(|r| r.to_string()).collect();
            Ok(Output::ok(match ctx.format("filter", &[Text, Json])? {
                Json => json(&serde_json::json!({ "pairs": pairs, "rules": rules })),
                _ => {
                    let mut s = String::from("% filtered pairs\n");
                    pairs.iter().enumerate().for_each(|(i, p)| {
                        let _ = writeln!(s, "{}: {p}", i + 1);
                    });
                    s.push_str("% filtered rules\n");
                    rules.iter().enumerate().for_each(|(i, p)| {
                        let _ = writeln!(s, "{}: {p}", i + 1);
                    });
                    s
                }
            }))
        }
        Verb::Graph => {
            let ex = ctx.example()?;
            let dp = dependency_pairs(&ex.trs);
            let g = estimated_dependency_graph(&dp);
            let witnessed = ctx.opts.max_size.map(|n| witnessed_edges(&dp, n, ctx.opts.budget.min(suites::WITNESS_BUDGET)));
            Ok(Output::ok(match ctx.format("graph", &[Text, Json, Dot])? {
                Json => {
                    let mut v = g.to_json();
                    if let Some(w) = &witnessed {
                        v["witnessed_edges"] = w.iter().map(|(a, b)| serde_json::json!([a, b])).collect();
                    }
                    json(&v)
                }
                Dot => g.to_dot(&dp),
                _ => {
                    let mut s = String::new();
                    for (i, p) in dp.pairs.iter().enumerate() {
                        let _ = writeln!(s, "node {}: {p}", i + 1);
                    }
                    for (a, b) in &g.edges {
                        let _ = writeln!(s, "edge {} -> {}", a + 1, b + 1);
                    }
                    for c in &g.sccs {
                        let m: Vec<String> = c.members.iter().map(|i| (i + 1).to_string()).collect();
                        let _ = writeln!(s, "scc rank {}: {{{}}}{}", c.rank, m.join(","), if c.trivial { " trivial" } else { "" });
                    }
                    let _ = writeln!(s, "{} nodes, {} edges, {} sccs", g.nodes.len(), g.edges.len(), g.sccs.len());
                    if let Some(w) = &witnessed {
                        let _ = writeln!(s, "{} edges witnessed by terms of size <= {}", w.len(), ctx.opts.max_size.unwrap_or(0));
                    }
                    s
                }
            }))
        }
        Verb::Usable => {
            let ex = ctx.example()?;
            let dp = dependency_pairs(&ex.trs);
            let u = match ctx.opts.max_size {
                Some(n) => usable_rules_checked(&dp, n, ctx.opts.budget.min(suites::WITNESS_BUDGET)),
                None => usable_rules(&dp),
            };
            let rules: Vec<(usize, String)> = u.usable.iter().map(|&i| (i + 1, ex.trs.rules()[i].to_string())).collect();
            Ok(Output::ok(match ctx.format("usable", &[Text, Json, Csv])? {
                Json => json(&serde_json::json!({
                    "usable": rules.iter().map(|(i, r)| serde_json::json!({"rule": i, "text": r})).collect::<Vec<_>>(),
                    "exact_check": u.exact_check,
                })),
                Csv => table_csv(&["rule", "text"], &rules.iter().map(|(i, r)| vec![i.to_string(), r.clone()]).collect::<Vec<_>>()),
                _ => {
                    let mut s = String::new();
                    for (i, r) in &rules {
                        let _ = writeln!(s, "{i}: {r}");
                    }
                    let _ = writeln!(s, "{} usable rules", rules.len());
                    if let Some(ok) = u.exact_check {
                        let _ = writeln!(s, "witness check up to size {}: {}", ctx.opts.max_size.unwrap_or(0), if ok { "agrees" } else { "DISAGREES" });
                    }
                    s
                }
            }))
        }
        Verb::Derive => {
            let ex = ctx.example()?;
            let d = ctx.derivation(&ex.trs)?;
            Ok(Output::ok(derivation_output(&d, ctx.format("derive", &[Text, Json, Csv])?)))
        }
        Verb::Pgraph => {
            let ex = ctx.example()?;
            let d = ctx.derivation(&ex.trs)?;
            let g = progenitor_graph(&ex.trs, &d)?;
            Ok(Output::ok(match ctx.format("pgraph", &[Text, Json, Dot])? {
                Json => json(&g.to_json()),
                Dot => g.to_dot(),
                _ => {
                    let mut s = String::new();
                    for n in &g.nodes {
                        let _ = writeln!(s, "node {n}");
                    }
                    for (a, b) in &g.edges {
                        let _ = writeln!(s, "edge {a} -> {b}");
                    }
                    let _ = writeln!(s, "{} nodes, {} edges, height {}", g.nodes.len(), g.edges.len(), g.height());
                    s
                }
            }))
        }
        Verb::Ig => {
            let ex = ctx.example()?;
            let t = ctx.term(&ex.trs)?;
            let img = ig_transform(&ex.trs, &t, ctx.opts.budget)?;
            let dh = HeightCache::new(&ex.trs, ctx.opts.budget).dh(&t)?;
            let e = e_constant(&ex.trs);
            let (g, exact) = g_lower(e, t.size(), dh);
            let holds = num_bigint::BigUint::from(img.size) <= g;
            let text = match ctx.format("ig", &[Text, Json])? {
                Json => json(&serde_json::json!({
                    "image": img.image.to_string(), "size": img.size, "dh": dh, "E": e,
                    "bound": g.to_string(), "bound_exact": exact, "pass": holds,
                })),
                _ => format!(
                    "I_G({t}) = {}\nsize {} <= {}g({},{dh}) = {g} with E = {e}: {}\n",
                    img.image,
                    img.size,
                    if exact { "" } else { "lower bound of " },
                    t.size(),
                    if holds { "holds" } else { "FAILS" }
                ),
            };
            Ok(Output { text, ok: holds })
        }
        Verb::Measure => {
            let ex = ctx.example()?;
            let mode = match ctx.opts.mode {
                Mode::Dc => ComplexityMode::Dc,
                Mode::Dp => ComplexityMode::DpComplexity,
                Mode::Scc => ComplexityMode::SccComplexity,
            };
            let rows = empirical_complexity(&ex.trs, ctx.opts.max_size.unwrap_or(5), mode, ctx.opts.budget)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.size.to_string(), r.value.to_string(), r.witness.as_ref().map(|t| t.to_string()).unwrap_or_default()])
                .collect();
            Ok(Output::ok(match ctx.format("measure", &[Text, Json, Csv])? {
                Json => json(&serde_json::json!({ "mode": format!("{:?}", ctx.opts.mode).to_lowercase(), "rows": rows })),
                Csv => table_csv(&["size", "value", "witness"], &table),
                _ => {
                    let mut s = format!("size  value  witness ({:?})\n", ctx.opts.mode).to_lowercase();
                    for r in &table {
                        let _ = writeln!(s, "{:>4}  {:>5}  {}", r[0], r[1], r[2]);
                    }
                    s
                }
            }))
        }
        Verb::Check { suite } => check(&ctx, suite),
        Verb::Simgen => {
            let ex = ctx.example()?;
            let mut terms = Vec::new();
            if ctx.has_derivation() || ctx.opts.term.is_some() {
                terms = ctx.derivation(&ex.trs)?.terms().into_iter().cloned().collect();
            }
            let f = sim_f(parse_sim_f(&ctx.opts.sim_f)?, &ex.trs, &terms, ctx.opts.budget)?;
            let params = SimParams::for_trs(&ex.trs, f);
            let sys = SimSystem::new(params.clone())?;
            let rules: Vec<(String, String)> =
                sys.trs.rules().iter().enumerate().map(|(i, r)| (sys.label(i), r.to_string())).collect();
            Ok(Output::ok(match ctx.format("simgen", &[Text, Json, Csv])? {
                Json => json(&serde_json::json!({
                    "params": {"a": params.a, "C": params.c, "k": params.k},
                    "rules": rules.iter().map(|(l, r)| serde_json::json!({"label": l, "rule": r})).collect::<Vec<_>>(),
                })),
                Csv => table_csv(&["label", "rule"], &rules.iter().map(|(l, r)| vec![l.clone(), r.clone()]).collect::<Vec<_>>()),
                _ => {
                    let labels: Vec<&str> = rules.iter().map(|(l, _)| l.as_str()).collect();
                    let mut s = format!("(COMMENT a = {}, C = {}, k = {}\n", params.a, params.c, params.k);
                    let _ = writeln!(s, "  rules in order: {})", labels.join(" "));
                    s.push_str(&sys.trs.to_text());
                    s
                }
            }))
        }
        Verb::Simulate => simulate(&ctx),
        Verb::Fast { n, m } => {
            let d = ctx.opts.param.unwrap_or(2);
            let d = u32::try_from(d).map_err(|_| CliError::Usage(format!("--param {d} too large")))?;
            let v = Fast::new(d)?.eval(*n, *m);
            Ok(Output::ok(match ctx.format("fast", &[Text, Json])? {
                Json => json(&serde_json::json!({"d": d, "n": n, "m": m, "exact": v.is_exact(), "value": v.to_string()})),
                _ => format!("F_{n}({m}) = {v}\n"),
            }))
        }
    }
}

fn derivation_output(d: &Derivation, f: Format) -> String {
    match f {
        Format::Json => json(&serde_json::json!({
            "initial": d.initial.to_string(),
            "length": d.len(),
            "steps": d.steps.iter().map(|s| serde_json::json!({
                "position": s.redex.to_string(), "rule": s.rule_index + 1, "term": s.target.to_string(),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut rows = vec![vec!["0".to_string(), String::new(), String::new(), d.initial.to_string()]];
            for (i, s) in d.steps.iter().enumerate() {
                rows.push(vec![(i + 1).to_string(), s.redex.to_string(), (s.rule_index + 1).to_string(), s.target.to_string()]);
            }
            table_csv(&["step", "position", "rule", "term"], &rows)
        }
        _ => write_trace(d),
    }
}

fn check(ctx: &Ctx, suite: &str) -> Result<Output, CliError> {
    let o = ctx.opts;
    let algebra = match &o.algebra {
        Some(path) => Some(AlgebraSpec {
            text: read(path)?,
            target: match o.orient {
                Orient::Pairs => Target::PairsOverRules,
                Orient::Usable => Target::PairsOverUsable,
                Orient::Rules => Target::Rules,
            },
            mode: match o.grid {
                Some(grid) => AlgebraMode::Sampled { grid },
                None => AlgebraMode::LinearExact,
            },
        }),
        None => None,
    };
    let mut cfg = SuiteConfig {
        random: o.random,
        seed: o.seed,
        budget: o.budget,
        max_size: o.max_size,
        grid: o.grid,
        param: o.param,
        f_rules: parse_sim_f(&o.sim_f)?,
        derivations: None,
        algebra,
        filter: None,
    };
    let rows = match (suite, &o.example) {
        ("g", _) => suites::g_rows(),
        ("fast", _) => suites::fast_rows()?,
        ("all", None) => {
            let examples: Vec<Example> = builtin_examples();
            run_all(&examples, &cfg)?
        }
        (_, None) => {
            return Err(CliError::Usage(format!("suite {suite} needs --example NAME|FILE")));
        }
        _ => {
            let ex = ctx.example()?;
            if ctx.has_derivation() {
                cfg.derivations = Some(vec![ctx.derivation(&ex.trs)?]);
            }
            if let Some(spec) = &o.filter {
                cfg.filter = Some(parse_filter(spec, &dependency_pairs(&ex.trs))?);
            }
            if suite == "all" {
                run_all(std::slice::from_ref(&ex), &cfg)?
            } else {
                run_suite(suite, &ex, &cfg)?
            }
        }
    };
    let ok = all_pass(&rows);
    let text = match ctx.format("check", &[Format::Text, Format::Json, Format::Csv])? {
        Format::Json => json(&rows_json(&rows)),
        Format::Csv => rows_csv(&rows),
        _ => rows_text(&rows),
    };
    Ok(Output { text, ok })
}

fn simulate(ctx: &Ctx) -> Result<Output, CliError> {
    let ex = ctx.example()?;
    let f = ctx.format("simulate", &[Format::Text, Format::Json])?;
    let seed_only = ctx.opts.term.is_some() && !ctx.has_derivation() && ctx.opts.strategy.is_none();
    let d = if seed_only { Derivation::empty(ctx.term(&ex.trs)?) } else { ctx.derivation(&ex.trs)? };
    let fr = sim_f(parse_sim_f(&ctx.opts.sim_f)?, &ex.trs, d.terms(), ctx.opts.budget)?;
    let mut sim = SimContext::new(&ex.trs, SimParams::for_trs(&ex.trs, fr), ctx.opts.budget)?;
    let mut witnesses: Vec<(String, Derivation)> = Vec::new();
    if seed_only {
        let t = &d.initial;
        witnesses.push((format!("seed {t}"), sim.seed(t)?));
    } else {
        for (k, s) in d.steps.iter().enumerate() {
            witnesses.push((format!("step {}: {} -> {}", k + 1, s.source, s.target), sim.simulate_step(k, s)?));
        }
    }
    Ok(Output::ok(match f {
        Format::Json => json(&serde_json::json!(witnesses
            .iter()
            .map(|(what, w)| serde_json::json!({
                "simulates": what,
                "length": w.len(),
                "initial": w.initial.to_string(),
                "steps": w.steps.iter().map(|s| serde_json::json!({
                    "position": s.redex.to_string(),
                    "rule": sim.system.label(s.rule_index),
                    "term": s.target.to_string(),
                })).collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>())),
        _ => {
            let mut s = String::new();
            for (what, w) in &witnesses {
                let _ = writeln!(s, "% {what} ({} steps)", w.len());
                s.push_str(&write_trace(w));
            }
            s
        }
    }))
}
