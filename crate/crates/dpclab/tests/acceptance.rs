//! One PASS/FAIL line per acceptance criterion. Exits 1 if any fails.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use num_bigint::BigUint;

use dpclab::bounds::{check_algebra, closed_form_holds, g_bound, parse_algebra, AlgebraMode, Orientation};
use dpclab::cli::corpus::{builtin, rl_start, Example};
use dpclab::cli::report::{all_pass, Row};
use dpclab::cli::suites::{run_suite, SuiteConfig};
use dpclab::dp::{dependency_pairs, estimated_dependency_graph, sharp, usable_rules};
use dpclab::progeny::progenitor_graph;
use dpclab::rewrite::{
    empirical_complexity, one_step_reducts, parse_trace, relative_derivation_height, ComplexityMode, Derivation,
};
use dpclab::simtrs::{
    f_constant, f_for_terms, fast_lemma_checks, reachable_within, sccheight, seed_term_derivation,
    simulate_derivation, tr_encode, SccHeight, SccHeights, SimContext, SimParams,
};
use dpclab::term::{ground_terms_up_to, parse_term, Term, Trs};

const BUDGET: usize = 200_000;

type Outcome = Result<(), String>;

fn ex(name: &str) -> Example {
    builtin(name, None).unwrap_or_else(|| panic!("builtin {name}"))
}

fn t(s: &str) -> Term {
    parse_term(s, &[]).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn trace(e: &Example, file: &str) -> Derivation {
    let (_, text) = e.traces.iter().find(|(n, _)| *n == file).unwrap_or_else(|| panic!("trace {file}"));
    parse_trace(&e.trs, text).unwrap_or_else(|err| panic!("{file}: {err}"))
}

fn cfg(random: Option<usize>, seed: u64) -> SuiteConfig {
    SuiteConfig {
        random,
        seed,
        budget: BUDGET,
        max_size: None,
        grid: None,
        param: None,
        f_rules: None,
        derivations: None,
        algebra: None,
        filter: None,
    }
}

fn suite_ok(suite: &str, e: &Example, c: &SuiteConfig, expect_rows: Option<usize>) -> Outcome {
    let rows: Vec<Row> = run_suite(suite, e, c).map_err(|err| format!("{suite} on {}: {err}", e.name))?;
    if let Some(n) = expect_rows {
        ensure(rows.len() == n, || format!("{suite} on {}: {} rows, wanted {n}", e.name, rows.len()))?;
    }
    match rows.iter().find(|r| !r.pass) {
        None if all_pass(&rows) => Ok(()),
        Some(r) => Err(format!("{} failed: lhs={:?} rhs={:?} {:?}", r.check, r.lhs, r.rhs, r.witness)),
        None => unreachable!(),
    }
}

/// Plain memoized `dh` by exhaustive successor search.
fn naive_dh(trs: &Trs, s: &Term, memo: &mut HashMap<Term, usize>) -> usize {
    if let Some(&v) = memo.get(s) {
        return v;
    }
    let v = one_step_reducts(trs, s)
        .into_iter()
        .map(|st| 1 + naive_dh(trs, &st.target, memo))
        .max()
        .unwrap_or(0);
    memo.insert(s.clone(), v);
    v
}

fn ackermann(m: u64, n: u64) -> u64 {
    match (m, n) {
        (0, n) => n + 1,
        (m, 0) => ackermann(m - 1, 1),
        (m, n) => ackermann(m - 1, ackermann(m, n - 1)),
    }
}

fn pair_strings(trs: &Trs) -> Vec<String> {
    dependency_pairs(trs).pairs.iter().map(|r| format!("{} -> {}", r.lhs, r.rhs)).collect()
}

fn c1() -> Outcome {
    let cases: [(&str, &[&str]); 3] = [
        (
            "Ra",
            &[
                "∘#(i(x),∘(y,z)) -> ∘#(f(x,i(x)),∘(i(i(y)),z))",
                "∘#(i(x),∘(y,z)) -> f#(x,i(x))",
                "∘#(i(x),∘(y,z)) -> ∘#(i(i(y)),z)",
                "∘#(i(x),∘(y,z)) -> i#(i(y))",
                "∘#(i(x),∘(y,z)) -> i#(y)",
                "∘#(i(x),∘(y,∘(z,w))) -> ∘#(f(x,i(x)),∘(z,∘(y,w)))",
                "∘#(i(x),∘(y,∘(z,w))) -> f#(x,i(x))",
                "∘#(i(x),∘(y,∘(z,w))) -> ∘#(z,∘(y,w))",
                "∘#(i(x),∘(y,∘(z,w))) -> ∘#(y,w)",
            ],
        ),
        ("Rde", &["f#(s(x)) -> f#(f(x))", "f#(s(x)) -> f#(x)"]),
        ("Rebin", &["d#(s(x)) -> d#(x)", "e#(s(x),y) -> e#(x,d(y))", "e#(s(x),y) -> d#(y)"]),
    ];
    for (name, want) in cases {
        let got = pair_strings(&ex(name).trs);
        let want: BTreeSet<String> = want.iter().map(|s| s.to_string()).collect();
        let got_set: BTreeSet<String> = got.iter().cloned().collect();
        ensure(got.len() == want.len() && got_set == want, || format!("{name}: {got:?}"))?;
    }
    Ok(())
}

fn graph_strings(e: &Example, file: &str) -> (Vec<String>, Vec<String>) {
    let g = progenitor_graph(&e.trs, &trace(e, file)).expect("progenitor graph");
    let nodes = g.nodes.iter().map(|n| n.to_string()).collect();
    let edges = g.edges.iter().map(|(a, b)| format!("{a}>{b}")).collect();
    (nodes, edges)
}

fn c2() -> Outcome {
    let cases: [(&str, &str, &[&str], &[&str]); 3] = [
        ("Rb", "fig1.trace", &["t1@", "t1@1", "t1@1.1", "t2@1", "t2@1.1"], &["t1@1>t2@1", "t1@1>t2@1.1"]),
        (
            "Rd",
            "rd.trace",
            &["t1@", "t2@1", "t2@1.1", "t3@1.1.1", "t3@1.1.1.1", "t4@1.1", "t4@1.1.1"],
            &["t1@>t2@1", "t1@>t2@1.1", "t2@1>t4@1.1", "t2@1>t4@1.1.1", "t2@1.1>t3@1.1.1", "t2@1.1>t3@1.1.1.1"],
        ),
        ("Re", "re.trace", &["t1@", "t2@1.1", "t3@1.1.1.1"], &["t1@>t2@1.1", "t2@1.1>t3@1.1.1.1"]),
    ];
    for (name, file, nodes, edges) in cases {
        let (n, e) = graph_strings(&ex(name), file);
        let sorted = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        ensure(n.len() == nodes.len() && n.iter().cloned().collect::<BTreeSet<_>>() == sorted(nodes), || {
            format!("{name} nodes {n:?}")
        })?;
        ensure(e.len() == edges.len() && e.iter().cloned().collect::<BTreeSet<_>>() == sorted(edges), || {
            format!("{name} edges {e:?}")
        })?;
    }
    Ok(())
}

fn c3() -> Outcome {
    let rde = ex("Rde");
    let dc = empirical_complexity(&rde.trs, 5, ComplexityMode::Dc, BUDGET).map_err(|e| e.to_string())?;
    let mut memo = HashMap::new();
    for n in 1..=3u32 {
        let d = trace(&rde, &format!("rde_n{n}.trace"));
        let want_steps = (1usize << n) - 1;
        ensure(d.len() == want_steps, || format!("n={n}: {} steps, wanted {want_steps}", d.len()))?;
        let start = Term::app("f", vec![Term::iterate("s", n as usize, Term::constant("0"))]);
        let end = Term::iterate("s", n as usize, Term::iterate("f", 1 << n, Term::constant("0")));
        ensure(d.initial == start && *d.last() == end, || format!("n={n}: endpoints {} / {}", d.initial, d.last()))?;
        let bound = ((1u64 << n) - 1) + ((1u64 << (1u64 << n)) - 1);
        let size = start.size();
        let row = &dc[size - 1];
        ensure(row.value as u64 >= bound, || format!("n={n}: Dc({size}) = {} < {bound}", row.value))?;
        // the reachable set from f(s^3(0)) is too large for plain search
        if n <= 2 {
            let oracle = naive_dh(&rde.trs, &start, &mut memo) as u64;
            ensure(oracle >= bound, || format!("n={n}: naive dh = {oracle} < {bound}"))?;
            ensure(row.value as u64 >= oracle, || format!("n={n}: Dc({size}) = {} < naive dh {oracle}", row.value))?;
        }
    }
    let dpc = empirical_complexity(&rde.trs, 6, ComplexityMode::DpComplexity, BUDGET).map_err(|e| e.to_string())?;
    for r in &dpc {
        ensure(r.value <= r.size, || format!("dp_complexity({}) = {}", r.size, r.value))?;
    }
    Ok(())
}

fn algebra_report(e: &Example, strict: Vec<dpclab::term::Rule>, weak: Vec<dpclab::term::Rule>, mode: AlgebraMode) -> Outcome {
    let alg = parse_algebra(&e.algebras[0].text).map_err(|err| err.to_string())?;
    let r = check_algebra(&Orientation { strict, weak }, &alg, mode).map_err(|err| err.to_string())?;
    ensure(r.pass(), || format!("{}: {:?}", e.name, r.to_json()))
}

fn c4() -> Outcome {
    let e = ex("Rebin");
    let dp = dependency_pairs(&e.trs);
    let u = usable_rules(&dp);
    let got: Vec<String> = u.usable.iter().map(|&i| e.trs.rules()[i].to_string()).collect();
    ensure(got == ["d(0) -> 0", "d(s(x)) -> s(s(d(x)))"], || format!("usable rules {got:?}"))?;
    let weak = u.with_ce(&dp).rules().to_vec();
    algebra_report(&e, dp.pairs.clone(), weak, AlgebraMode::Sampled { grid: 6 })
}

fn c5() -> Outcome {
    let e = ex("Rde");
    let dp = dependency_pairs(&e.trs);
    algebra_report(&e, dp.pairs.clone(), e.trs.rules().to_vec(), AlgebraMode::LinearExact)?;
    let pairs = dp.pairs_trs();
    for n in 0..=5 {
        let s = sharp(&e.trs, &Term::app("f", vec![Term::iterate("s", n, Term::constant("0"))]));
        let h = relative_derivation_height(&pairs, &e.trs, &s, BUDGET).map_err(|err| err.to_string())?;
        ensure(h <= n, || format!("dh({s}) = {h} > {n}"))?;
    }
    Ok(())
}

fn c6() -> Outcome {
    let rb = ex("Rb").trs;
    let dp = dependency_pairs(&rb);
    let g = estimated_dependency_graph(&dp);
    ensure(g.edges.is_empty(), || format!("edges {:?}", g.edges))?;
    ensure(g.sccs.len() == 2 && g.sccs.iter().all(|c| c.trivial), || format!("sccs {:?}", g.sccs))?;
    let pairs = pair_strings(&rb);
    let rank_of = |s: &str| pairs.iter().position(|p| p == s).map(|i| g.pair_rank(i));
    ensure(rank_of("f#(x) -> g#(c,x)") == Some(1) && rank_of("f#(x) -> c#") == Some(2), || format!("ranks {pairs:?}"))?;
    let heights = [
        ("c", (0, 1)),
        ("g(c,c)", (0, 1)),
        ("f(f(c))", (2, 1)),
        ("f(c)", (2, 1)),
        ("f(g(c,c))", (2, 1)),
    ];
    for (s, (rank, h)) in heights {
        let got = sccheight(&rb, &g, &t(s), BUDGET).map_err(|e| e.to_string())?;
        ensure(got == SccHeight::new(rank, h), || format!("sccheight({s}) = {got}"))?;
    }
    let trs_values = [
        ("f(f(c))", "g_2(s(0),g_2(s(0),g_0(s(0),c,c),c),c)"),
        ("f(g(c,c))", "g_2(s(0),g_0(s(0),g_0(s(0),c,c),g_0(s(0),c,c)),c)"),
    ];
    for (s, want) in trs_values {
        let got = tr_encode(&rb, &g, &t(s), BUDGET).map_err(|e| e.to_string())?;
        ensure(got == t(want), || format!("tr({s}) = {got}"))?;
    }
    Ok(())
}

fn rb_params() -> SimParams {
    SimParams { a: 2, c: 2, k: 2, f_rules: f_constant(1) }
}

fn c7() -> Outcome {
    let rb = ex("Rb");
    let ctx = SimContext::new(&rb.trs, rb_params(), BUDGET).map_err(|e| e.to_string())?;
    let r = "g_0(s(0),c,c)";
    let displayed = [
        ("g_2(s(0),g_2(s(0),g_0(s(0),c,c),c),c)", 0),
        ("g_2(s(0),g_2(0,g_2(0,g_2(0,r,c),g_2(0,r,c)),g_2(0,g_2(0,r,c),g_2(0,r,c))),c)", 1),
        ("g_2(s(0),g_2(0,g_2(0,g_0(s(0),c,c),c),g_2(0,g_0(s(0),c,c),c)),c)", 1),
        ("g_2(s(0),g_2(0,g_0(s(0),c,c),g_0(s(0),c,c)),c)", 2),
        ("g_2(s(0),g_1(f(size(g_0(0,r,r))),r,r),c)", 1),
        ("g_2(s(0),g_0(f(size(g_0(0,r,r))),r,r),c)", 1),
        ("g_2(s(0),g_0(s(0),g_0(s(0),c,c),g_0(s(0),c,c)),c)", 1),
    ];
    let terms: Vec<Term> = displayed.iter().map(|(s, _)| t(&s.replace('r', r))).collect();
    for k in 1..terms.len() {
        let steps = displayed[k].1;
        let found = reachable_within(ctx.sim_trs(), &terms[k - 1], &terms[k], steps);
        ensure(found.is_some(), || format!("segment {k}: {} does not reach {} in {steps}", terms[k - 1], terms[k]))?;
    }

    for (name, file, params) in [("Rb", "fig1.trace", Some(rb_params())), ("Rd", "rd.trace", None)] {
        let e = ex(name);
        let d = trace(&e, file);
        let p = match params {
            Some(p) => p,
            None => {
                let mut h = SccHeights::new(&e.trs, BUDGET);
                SimParams::for_trs(&e.trs, f_for_terms(&mut h, d.terms()).map_err(|err| err.to_string())?)
            }
        };
        let dg = estimated_dependency_graph(&dependency_pairs(&e.trs));
        let ws = simulate_derivation(&e.trs, &dg, &p, &d, BUDGET).map_err(|err| format!("{name}: {err}"))?;
        let mut ctx = SimContext::new(&e.trs, p, BUDGET).map_err(|err| err.to_string())?;
        ensure(ws.len() == d.len(), || format!("{name}: {} witnesses", ws.len()))?;
        for (i, (w, s)) in ws.iter().zip(&d.steps).enumerate() {
            w.validate(ctx.sim_trs()).map_err(|err| format!("{name} step {}: {err}", i + 1))?;
            let (a, b) = (ctx.tr(&s.source).map_err(|e| e.to_string())?, ctx.tr(&s.target).map_err(|e| e.to_string())?);
            ensure(!w.is_empty() && w.initial == a && *w.last() == b, || format!("{name} step {}: wrong endpoints", i + 1))?;
        }
    }

    let dg = estimated_dependency_graph(&dependency_pairs(&rb.trs));
    let seeds: Vec<Term> = ground_terms_up_to(rb.trs.signature(), 7).into_iter().filter(|u| u.depth() <= 2).collect();
    // 2 constants; 2 + 2 + 2·2² = 12 terms of depth ≤ 1; 2 + 12 + 2·12² of depth ≤ 2
    ensure(seeds.len() == 302, || format!("{} Rb terms of depth <= 2", seeds.len()))?;
    let mut ctx = SimContext::new(&rb.trs, rb_params(), BUDGET).map_err(|e| e.to_string())?;
    for u in &seeds {
        let d = seed_term_derivation(&rb.trs, &dg, &rb_params(), u, BUDGET).map_err(|e| format!("seed {u}: {e}"))?;
        d.validate(ctx.sim_trs()).map_err(|e| format!("seed {u}: {e}"))?;
        let z = Term::iterate("g", u.depth(), Term::constant("z"));
        let want = ctx.tr(u).map_err(|e| e.to_string())?;
        ensure(d.initial == z && *d.last() == want, || format!("seed {u}: endpoints {} / {}", d.initial, d.last()))?;
    }
    Ok(())
}

const PROPERTY_SEED: u64 = 20_240_101;

fn c8() -> Outcome {
    for name in ["Rb", "Rd", "Re", "Rde", "Rebin"] {
        let e = ex(name);
        for suite in ["progeny", "rank", "depth"] {
            suite_ok(suite, &e, &cfg(Some(200), PROPERTY_SEED), Some(200))?;
        }
    }
    Ok(())
}

fn c9() -> Outcome {
    for name in ["Re", "Rd"] {
        suite_ok("srs", &ex(name), &cfg(Some(200), PROPERTY_SEED), Some(200))?;
    }
    Ok(())
}

fn c10() -> Outcome {
    let rl = builtin("Rl", Some(2)).expect("R(2)");
    let mut memo = HashMap::new();
    for n in 0..=2u64 {
        let s = rl_start(0, n as usize);
        let h = naive_dh(&rl.trs, &s, &mut memo) as u64;
        let want = ackermann(0, n);
        ensure(want == n + 1 && h >= want, || format!("dh({s}) = {h} < {want}"))?;
    }
    suite_ok("ackermann", &rl, &cfg(None, 0), None)
}

fn c11() -> Outcome {
    for e in [6usize, 8] {
        for m in 0..=4 {
            let g = g_bound(e, m, 0).map_err(|x| x.to_string())?;
            ensure(g == BigUint::from(e).pow(m as u32 + 1), || format!("g({m},0) at E={e}: {g}"))?;
        }
        for n in 0..=2 {
            let g = g_bound(e, 0, n).map_err(|x| x.to_string())?;
            ensure(g == BigUint::from(e), || format!("g(0,{n}) at E={e}: {g}"))?;
        }
        for m in 0..=4 {
            for n in 0..=2 {
                let g = g_bound(e, m, n).map_err(|x| x.to_string())?;
                // g < 2^bits ≤ base^exp whenever bits ≤ exp·log2(base)
                let exp = (n as f64 + 1.0) * (e as f64).powi(2 * m as i32 + 1);
                let by_logs = g.bits() as f64 <= exp * ((e * (n + 1)) as f64).log2();
                let lib = closed_form_holds(e, m, n).map_err(|x| x.to_string())?;
                ensure(by_logs && lib, || format!("closed form at E={e}, m={m}, n={n}"))?;
            }
        }
    }
    for d in [2u32, 3] {
        let checks = fast_lemma_checks(d, 2, 5).map_err(|x| x.to_string())?;
        ensure(checks.len() == 4, || format!("{} fast checks", checks.len()))?;
        for c in checks {
            ensure(c.passed() && c.checked > 0, || format!("d={d}: {c:?}"))?;
        }
    }
    suite_ok("ig", &ex("Rebin"), &cfg(Some(50), PROPERTY_SEED), Some(50))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("dependency pair counts and terms for Ra, Rde, Rebin", c1),
        ("progenitor graphs of Rb, Rd and Re derivations", c2),
        ("Rde trace lengths, Dc lower bounds, linear DP complexity", c3),
        ("Rebin usable rules and algebra on DP / U with Ce", c4),
        ("Rde reduction pair and relative heights of f#(s^n(0))", c5),
        ("Rb dependency graph, sccheight and tr values", c6),
        ("simulating system: displayed derivation, step witnesses, seeds", c7),
        ("progeny, rank and depth suites on 200 random derivations", c8),
        ("string rewriting bounds on Re and Rd", c9),
        ("R(2) heights against Ackermann", c10),
        ("g function, fast functions and I_G sizes", c11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(()) => println!("PASS {}: {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
