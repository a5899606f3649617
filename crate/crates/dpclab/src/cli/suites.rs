//! Check suites behind `dpclab check`. Every suite returns one row per
//! checked item, in a deterministic order.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::corpus::{rl_start, AlgebraSpec, Example, Target, DEFAULT_L};
use super::report::Row;
use super::CliError;
use crate::bounds::{
    check_algebra, check_dc_bound_from_algebra, check_depth_bound, check_srs_bounds, closed_form_holds, e_constant,
    g_bound, g_lower, ig_symbols, ig_transform, parse_algebra, parse_expr, Orientation,
};
use crate::dp::{
    dependency_pairs, estimated_dependency_graph, step_or_equal, usable_rules, usable_witnesses, witnessed_edges,
    ArgumentFiltering,
};
use crate::progeny::check_progeny_properties;
use crate::rewrite::{
    empirical_complexity, parse_trace, random_derivation, random_ground_term, ComplexityMode, Derivation, HeightCache,
};
use crate::simtrs::{
    f_for_terms, fast_lemma_checks, longest_derivation, rank_monotonicity_violations, SccHeights, SimContext, SimParams,
};
use crate::term::{ground_terms_up_to, Term, Trs};

pub const SUITES: [&str; 16] = [
    "traces", "progeny", "rank", "depth", "srs", "filter", "graph", "complexity", "algebra", "ig", "sim", "seed",
    "chain", "ackermann", "g", "fast",
];

/// Examples the random-derivation suites run on when no example is given.
pub const PROPERTY_EXAMPLES: [&str; 5] = ["Rb", "Rd", "Re", "Rde", "Rebin"];

pub const DEFAULT_RANDOM: usize = 200;
pub const RANDOM_MAX_SIZE: usize = 10;
pub const RANDOM_MAX_STEPS: usize = 12;
/// Per-instance exploration cap for edge and usable-rule witness searches.
pub const WITNESS_BUDGET: usize = 2000;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub random: Option<usize>,
    pub seed: u64,
    pub budget: usize,
    pub max_size: Option<usize>,
    pub grid: Option<usize>,
    pub param: Option<usize>,
    /// `f` of the simulating system; `None` picks the constant at the largest
    /// height among the simulated terms.
    pub f_rules: Option<Trs>,
    /// Replaces random derivations when set.
    pub derivations: Option<Vec<Derivation>>,
    /// Replaces the example's algebras when set.
    pub algebra: Option<AlgebraSpec>,
    pub filter: Option<ArgumentFiltering>,
}

/// `count` derivations of at most `max_steps` steps from uniformly drawn
/// ground terms of size `1..=max_size`.
pub fn random_derivations(trs: &Trs, count: usize, seed: u64, max_size: usize, max_steps: usize) -> Vec<Derivation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t = loop {
                let size = rng.gen_range(1..=max_size.max(1));
                if let Some(t) = random_ground_term(trs, size, &mut rng) {
                    break t;
                }
            };
            random_derivation(trs, &t, max_steps, &mut rng)
        })
        .collect()
}

fn derivations(ex: &Example, cfg: &SuiteConfig) -> Vec<Derivation> {
    match &cfg.derivations {
        Some(ds) => ds.clone(),
        None => random_derivations(
            &ex.trs,
            cfg.random.unwrap_or(DEFAULT_RANDOM),
            cfg.seed,
            cfg.max_size.unwrap_or(RANDOM_MAX_SIZE),
            RANDOM_MAX_STEPS,
        ),
    }
}

fn bundled(ex: &Example) -> Result<Vec<Derivation>, CliError> {
    ex.traces.iter().map(|(_, t)| Ok(parse_trace(&ex.trs, t)?)).collect()
}

fn label(suite: &str, ex: &Example, item: impl std::fmt::Display) -> String {
    format!("{suite}:{}:{item}", ex.name)
}

/// Rows of `suite` on `ex`.
pub fn run_suite(suite: &str, ex: &Example, cfg: &SuiteConfig) -> Result<Vec<Row>, CliError> {
    let trs = &ex.trs;
    let rows = match suite {
        "traces" => ex
            .traces
            .iter()
            .map(|(name, text)| match parse_trace(trs, text) {
                Ok(d) => Row::new(label("traces", ex, name)).with("steps", d.len()),
                Err(e) => Row::new(label("traces", ex, name)).fail(e),
            })
            .collect(),
        "progeny" => derivations(ex, cfg)
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let row = match check_progeny_properties(trs, d) {
                    Ok(props) => Row::from_properties(label("progeny", ex, i + 1), &props),
                    Err(e) => Row::new(label("progeny", ex, i + 1)).fail(e),
                };
                row.with("start", &d.initial).with("steps", d.len())
            })
            .collect(),
        "rank" => {
            let mut h = SccHeights::new(trs, cfg.budget);
            derivations(ex, cfg)
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let mut checked = 0;
                    let mut bad = Vec::new();
                    for s in &d.steps {
                        match rank_monotonicity_violations(&mut h, s) {
                            Ok((c, v)) => {
                                checked += c;
                                bad.extend(v);
                            }
                            Err(e) => return Row::new(label("rank", ex, i + 1)).fail(e),
                        }
                    }
                    let mut row = Row::new(label("rank", ex, i + 1))
                        .cmp(bad.len(), "=", 0, bad.is_empty())
                        .with("checked", checked)
                        .with("start", &d.initial);
                    if let Some(v) = bad.first() {
                        row = row.with("first_violation", v);
                    }
                    row
                })
                .collect()
        }
        "depth" => derivations(ex, cfg)
            .iter()
            .enumerate()
            .map(|(i, d)| match check_depth_bound(trs, d, cfg.budget) {
                Ok(r) => Row { check: label("depth", ex, i + 1), ..Row::from_report(&r) },
                Err(e) => Row::new(label("depth", ex, i + 1)).fail(e),
            })
            .collect(),
        "srs" => {
            if !trs.is_srs() {
                return Err(CliError::Usage(format!("suite srs needs a string rewrite system, {} is not one", ex.name)));
            }
            derivations(ex, cfg)
                .iter()
                .enumerate()
                .map(|(i, d)| match check_srs_bounds(trs, d, cfg.budget) {
                    Ok(r) => Row { check: label("srs", ex, i + 1), ..Row::from_report(&r) },
                    Err(e) => Row::new(label("srs", ex, i + 1)).fail(e),
                })
                .collect()
        }
        "filter" => filter_rows(ex, cfg)?,
        "graph" => graph_rows(ex, cfg),
        "complexity" => complexity_rows(ex, cfg),
        "algebra" => algebra_rows(ex, cfg)?,
        "ig" => ig_rows(ex, cfg)?,
        "sim" => sim_rows(ex, cfg)?,
        "seed" => seed_rows(ex, cfg, false)?,
        "chain" => seed_rows(ex, cfg, true)?,
        "ackermann" => ackermann_rows(ex, cfg)?,
        "g" => g_rows(),
        "fast" => fast_rows()?,
        other => return Err(CliError::Usage(format!("unknown suite `{other}` (expected one of: all, {})", SUITES.join(", ")))),
    };
    Ok(rows)
}

/// Whether `suite` has anything to check on `ex` under `check all`.
fn applicable(suite: &str, ex: &Example, cfg: &SuiteConfig) -> bool {
    let property = PROPERTY_EXAMPLES.contains(&ex.name.as_str());
    match suite {
        "traces" | "graph" | "complexity" => true,
        "progeny" | "rank" | "depth" | "seed" | "chain" => property,
        "srs" => property && ex.trs.is_srs(),
        "filter" => ex.filter.is_some() || cfg.filter.is_some(),
        "algebra" => !ex.algebras.is_empty() || cfg.algebra.is_some(),
        "ig" => property && !ig_symbols(&ex.trs).is_empty(),
        "sim" => !ex.traces.is_empty() && ex.name != "Ra" && ex.name != "Rack",
        "ackermann" => ex.name == "Rl",
        _ => false,
    }
}

/// Every applicable suite on every example, then the example-independent
/// suites once.
pub fn run_all(examples: &[Example], cfg: &SuiteConfig) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for ex in examples {
        for suite in SUITES {
            if applicable(suite, ex, cfg) {
                rows.extend(run_suite(suite, ex, cfg)?);
            }
        }
    }
    rows.extend(g_rows());
    rows.extend(fast_rows()?);
    Ok(rows)
}

fn filter_rows(ex: &Example, cfg: &SuiteConfig) -> Result<Vec<Row>, CliError> {
    let pi = match (&cfg.filter, ex.filter) {
        (Some(f), _) => f.clone(),
        (None, Some(spec)) => super::parse_filter(spec, &dependency_pairs(&ex.trs))?,
        (None, None) => return Err(CliError::Usage(format!("no argument filtering for {}; pass --filter", ex.name))),
    };
    let rules = pi.trs(&ex.trs)?;
    let mut rows = Vec::new();
    for (i, d) in derivations(ex, cfg).iter().enumerate() {
        let mut bad = Vec::new();
        for s in &d.steps {
            let (a, b) = (pi.term(&s.source)?, pi.term(&s.target)?);
            if !step_or_equal(&rules, &a, &b) {
                bad.push(format!("{a} to {b}"));
            }
        }
        let mut row = Row::new(label("filter", ex, i + 1)).cmp(bad.len(), "=", 0, bad.is_empty()).with("steps", d.len());
        if let Some(v) = bad.first() {
            row = row.with("first_violation", v);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn graph_rows(ex: &Example, cfg: &SuiteConfig) -> Vec<Row> {
    let dp = dependency_pairs(&ex.trs);
    let g = estimated_dependency_graph(&dp);
    let size = cfg.max_size.unwrap_or(3);
    let budget = cfg.budget.min(WITNESS_BUDGET);
    let w = witnessed_edges(&dp, size, budget);
    let extra: Vec<String> = w.difference(&g.edges).map(|(a, b)| format!("{}>{}", a + 1, b + 1)).collect();
    let edges = Row::new(label("graph", ex, "witnessed_edges_estimated"))
        .cmp(extra.len(), "=", 0, extra.is_empty())
        .with("estimated", g.edges.len())
        .with("witnessed", w.len())
        .with("max_size", size);
    let u = usable_rules(&dp);
    let wu = usable_witnesses(&dp, size, budget);
    let missing: Vec<String> = wu.iter().filter(|i| !u.usable.contains(i)).map(|i| (i + 1).to_string()).collect();
    let usable = Row::new(label("graph", ex, "witnessed_rules_usable"))
        .cmp(missing.len(), "=", 0, missing.is_empty())
        .with("usable", u.usable.len())
        .with("witnessed", wu.len());
    vec![edges, usable]
}

/// `Dc(m) ≥ dpc(m)` for every size up to the bound.
fn complexity_rows(ex: &Example, cfg: &SuiteConfig) -> Vec<Row> {
    let n = cfg.max_size.unwrap_or(4);
    let dc = empirical_complexity(&ex.trs, n, ComplexityMode::Dc, cfg.budget);
    let dpc = empirical_complexity(&ex.trs, n, ComplexityMode::DpComplexity, cfg.budget);
    match (dc, dpc) {
        (Ok(dc), Ok(dpc)) => dc
            .iter()
            .zip(&dpc)
            .map(|(a, b)| Row::new(label("complexity", ex, a.size)).cmp(a.value, ">=", b.value, a.value >= b.value))
            .collect(),
        (Err(e), _) | (_, Err(e)) => vec![Row::new(label("complexity", ex, n)).fail(e)],
    }
}

fn algebra_rows(ex: &Example, cfg: &SuiteConfig) -> Result<Vec<Row>, CliError> {
    let specs: Vec<AlgebraSpec> = match &cfg.algebra {
        Some(a) => vec![a.clone()],
        None => ex.algebras.clone(),
    };
    if specs.is_empty() {
        return Err(CliError::Usage(format!("no algebra for {}; pass --algebra FILE", ex.name)));
    }
    let dp = dependency_pairs(&ex.trs);
    let mut rows = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        let alg = parse_algebra(&spec.text)?;
        let mode = match (spec.mode, cfg.grid) {
            (crate::bounds::AlgebraMode::Sampled { .. }, Some(grid)) => crate::bounds::AlgebraMode::Sampled { grid },
            (m, _) => m,
        };
        let report = match &spec.target {
            Target::PairsOverRules => check_algebra(
                &Orientation { strict: dp.pairs.clone(), weak: ex.trs.rules().to_vec() },
                &alg,
                mode,
            )?,
            Target::PairsOverUsable => check_algebra(
                &Orientation { strict: dp.pairs.clone(), weak: usable_rules(&dp).with_ce(&dp).rules().to_vec() },
                &alg,
                mode,
            )?,
            Target::Rules => check_algebra(&Orientation { strict: ex.trs.rules().to_vec(), weak: Vec::new() }, &alg, mode)?,
            Target::DcBound { p, n } => {
                let p = parse_expr(p, &["n".to_string()])?;
                check_dc_bound_from_algebra(&ex.trs, &alg, &p, *n, cfg.grid.unwrap_or(6), cfg.budget)?
            }
        };
        rows.push(Row { check: label("algebra", ex, format!("{}:{}", k + 1, report.check)), ..Row::from_report(&report) });
    }
    Ok(rows)
}

/// `|I_G(t)| ≤ g(|t|, dh(t))` on random terms.
fn ig_rows(ex: &Example, cfg: &SuiteConfig) -> Result<Vec<Row>, CliError> {
    let trs = &ex.trs;
    let e = e_constant(trs);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cache = HeightCache::new(trs, cfg.budget);
    let max = cfg.max_size.unwrap_or(5);
    let mut rows = Vec::new();
    for i in 0..cfg.random.unwrap_or(50) {
        let size = rng.gen_range(1..=max.max(1));
        let Some(t) = random_ground_term(trs, size, &mut rng) else { continue };
        let row = Row::new(label("ig", ex, i + 1));
        let row = match (ig_transform(trs, &t, cfg.budget), cache.dh(&t)) {
            (Ok(img), Ok(dh)) => {
                let (g, exact) = g_lower(e, t.size(), dh);
                let bound = if exact { format!("g({},{dh})", t.size()) } else { format!("g({},{dh})>={g}", t.size()) };
                row.cmp(img.size, "<=", &g, BigUint::from(img.size) <= g).with("term", &t).with("bound", bound)
            }
            (Err(err), _) => row.fail(err),
            (_, Err(err)) => row.fail(err),
        };
        rows.push(row);
    }
    Ok(rows)
}

fn sim_rows(ex: &Example, cfg: &SuiteConfig) -> Result<Vec<Row>, CliError> {
    let ds = match (&cfg.derivations, cfg.random) {
        (Some(ds), _) => ds.clone(),
        (None, Some(_)) => derivations(ex, cfg),
        (None, None) => bundled(ex)?,
    };
    let f = auto_f(cfg, &ex.trs, ds.iter().flat_map(|d| d.terms()))?;
    let mut ctx = SimContext::new(&ex.trs, SimParams::for_trs(&ex.trs, f), cfg.budget)?;
    let mut rows = Vec::new();
    for (i, d) in ds.iter().enumerate() {
        let row = Row::new(label("sim", ex, i + 1)).with("start", &d.initial);
        let mut total = 0;
        let mut failure = None;
        for (k, s) in d.steps.iter().enumerate() {
            let ends = ctx.simulate_step(k, s).and_then(|w| {
                total += w.len();
                Ok(w.initial == ctx.tr(&s.source)? && w.last() == &ctx.tr(&s.target)?)
            });
            match ends {
                Ok(true) => {}
                Ok(false) => failure = Some(format!("step {}: witness endpoints differ from tr", k + 1)),
                Err(e) => failure = Some(e.to_string()),
            }
            if failure.is_some() {
                break;
            }
        }
        rows.push(match failure {
            None => row.cmp(total, ">=", d.len(), total >= d.len()),
            Some(f) => row.fail(f),
        });
    }
    Ok(rows)
}

fn auto_f<'a>(cfg: &SuiteConfig, trs: &Trs, terms: impl IntoIterator<Item = &'a Term>) -> Result<Trs, CliError> {
    match &cfg.f_rules {
        Some(f) => Ok(f.clone()),
        None => Ok(f_for_terms(&mut SccHeights::new(trs, cfg.budget), terms)?),
    }
}

/// Ground terms of depth at most 2 within the size bound. With `chain`, also
/// checks that seeding `t` and simulating a longest derivation from `t`
/// takes at least `dh(t)` steps.
fn seed_rows(ex: &Example, cfg: &SuiteConfig, chain: bool) -> Result<Vec<Row>, CliError> {
    let trs = &ex.trs;
    let terms: Vec<_> = ground_terms_up_to(trs.signature(), cfg.max_size.unwrap_or(7))
        .into_iter()
        .filter(|t| t.depth() <= 2)
        .collect();
    let f = auto_f(cfg, trs, &terms)?;
    let mut ctx = SimContext::new(trs, SimParams::for_trs(trs, f), cfg.budget)?;
    let suite = if chain { "chain" } else { "seed" };
    let mut rows = Vec::new();
    for t in terms {
        let row = Row::new(label(suite, ex, &t));
        let seeded = ctx.seed(&t).and_then(|d| Ok((d.last() == &ctx.tr(&t)?, d.len())));
        let row = match seeded {
            Ok((false, _)) => row.fail("seed does not end in tr(t)"),
            Err(e) => row.fail(e),
            Ok((true, n)) if !chain => row.with("steps", n),
            Ok((true, n)) => match longest_derivation(trs, &t, cfg.budget) {
                Ok(d) => {
                    let mut total = n;
                    let mut err = None;
                    for (k, s) in d.steps.iter().enumerate() {
                        match ctx.simulate_step(k, s) {
                            Ok(w) => total += w.len(),
                            Err(e) => {
                                err = Some(e);
                                break;
                            }
                        }
                    }
                    match err {
                        None => row.cmp(total, ">=", d.len(), total >= d.len()),
                        Some(e) => row.fail(e),
                    }
                }
                Err(e) => row.fail(e),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Textbook recursion; only called on tiny arguments.
pub fn ackermann(m: u64, n: u64) -> u64 {
    match (m, n) {
        (0, n) => n + 1,
        (m, 0) => ackermann(m - 1, 1),
        (m, n) => ackermann(m - 1, ackermann(m, n - 1)),
    }
}

fn ackermann_rows(ex: &Example, cfg: &SuiteConfig) -> Result<Vec<Row>, CliError> {
    if ex.name != "Rl" {
        return Err(CliError::Usage("suite ackermann runs on Rl only".into()));
    }
    let l = cfg.param.unwrap_or(DEFAULT_L);
    let mut cache = HeightCache::new(&ex.trs, cfg.budget);
    let mut rows = Vec::new();
    for m in 0..=(l - 2).min(1) {
        for n in 0..=2 {
            let t = rl_start(m, n);
            let want = ackermann(m as u64, n as u64);
            let row = Row::new(format!("ackermann:Rl({l}):t({m},{n})"));
            rows.push(match cache.dh(&t) {
                Ok(h) => row.cmp(h, ">=", want, h as u64 >= want).with("term", &t),
                Err(e) => row.fail(e),
            });
        }
    }
    Ok(rows)
}

/// `g(m,0) = E^(m+1)`, `g(0,n) = E` and the closed-form bound.
pub fn g_rows() -> Vec<Row> {
    let mut rows = Vec::new();
    for e in [6usize, 8] {
        for m in 0..=4 {
            let row = Row::new(format!("g:E={e}:g({m},0)"));
            rows.push(match g_bound(e, m, 0) {
                Ok(v) => row.eq(v, BigUint::from(e).pow(m as u32 + 1)),
                Err(err) => row.fail(err),
            });
        }
        for n in 0..=2 {
            let row = Row::new(format!("g:E={e}:g(0,{n})"));
            rows.push(match g_bound(e, 0, n) {
                Ok(v) => row.eq(v, e),
                Err(err) => row.fail(err),
            });
        }
        for m in 0..=4 {
            for n in 0..=2 {
                let row = Row::new(format!("g:E={e}:closed_form({m},{n})"));
                rows.push(match closed_form_holds(e, m, n) {
                    Ok(ok) => row.cmp(format!("g({m},{n})"), "<=", format!("({e}*{})^({}*{e}^{})", n + 1, n + 1, 2 * m + 1), ok),
                    Err(err) => row.fail(err),
                });
            }
        }
    }
    rows
}

pub fn fast_rows() -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for d in [2, 3] {
        for p in fast_lemma_checks(d, 2, 5)? {
            rows.push(Row::from_properties(format!("fast:d={d}:{}", p.name), std::slice::from_ref(&p)));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ackermann_values() {
        assert_eq!((ackermann(0, 2), ackermann(1, 2), ackermann(2, 2), ackermann(3, 3)), (3, 4, 7, 61));
    }

    #[test]
    fn random_derivations_are_seeded() {
        let ex = super::super::corpus::builtin("Rb", None).unwrap();
        let a = random_derivations(&ex.trs, 5, 9, 10, 12);
        let b = random_derivations(&ex.trs, 5, 9, 10, 12);
        assert_eq!(a, b);
        assert!(a.iter().all(|d| d.initial.size() <= 10 && d.len() <= 12));
    }
}
