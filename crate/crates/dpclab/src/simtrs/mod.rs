//! The simulating system: `sccheight`, the `tr` encoding, the generated
//! rule schemata and constructive simulation witnesses.
//!
//! Rule `1_i` follows the `M`-abbreviation exactly: for `a = 2`, `C = 1` its
//! right-hand side is `g_i(x, g_i(x,x1,x2), g_i(x,x1,x2))`. The motivating
//! display that precedes the schemata writes `g_i(n,x1,x2)` for the second
//! argument, which the abbreviation does not produce.

mod fast;
mod witness;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::dp::{dependency_pairs, estimated_dependency_graph, sharp, DependencyGraph, DpProblem};
use crate::rewrite::{RelativeCache, RewriteError};
use crate::term::{Rule, Term, TermError, Trs};

pub use fast::{fast_function, fast_lemma_checks, Fast, FastValue};
pub use witness::{
    longest_derivation, reachable_within, seed_term_derivation, simulate_derivation, size_witness, SimContext,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("simulation failed at step {step}: {reason}")]
    SimulationFailed { step: usize, reason: String },
    #[error("{what} is too large to evaluate exactly")]
    ArgumentTooLarge { what: String },
    #[error("term {0} is not ground")]
    NotGround(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// `(rank, height)`, ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct SccHeight {
    pub rank: usize,
    pub height: usize,
}

impl SccHeight {
    pub fn new(rank: usize, height: usize) -> Self {
        SccHeight { rank, height }
    }
}

impl fmt::Display for SccHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rank, self.height)
    }
}

/// Memoizing `sccheight` oracle: one relative-height cache per SCC.
pub struct SccHeights {
    trs: Trs,
    dp: DpProblem,
    graph: DependencyGraph,
    // indexed by rank - 1
    caches: Vec<RelativeCache>,
    memo: HashMap<Term, SccHeight>,
}

impl SccHeights {
    pub fn new(trs: &Trs, budget: usize) -> Self {
        let dp = dependency_pairs(trs);
        let graph = estimated_dependency_graph(&dp);
        Self::with_graph(trs, &graph, budget)
    }

    /// Uses `graph` for SCCs and ranks; its node indices refer to
    /// `dependency_pairs(trs)`.
    pub fn with_graph(trs: &Trs, graph: &DependencyGraph, budget: usize) -> Self {
        let dp = dependency_pairs(trs);
        let caches = (1..=graph.sccs.len())
            .map(|rank| {
                let scc = graph.by_rank(rank).expect("ranks are 1..=k");
                RelativeCache::new(&dp.subset(&scc.members), trs, budget)
            })
            .collect();
        SccHeights {
            trs: trs.clone(),
            dp,
            graph: graph.clone(),
            caches,
            memo: HashMap::new(),
        }
    }

    pub fn trs(&self) -> &Trs {
        &self.trs
    }

    pub fn problem(&self) -> &DpProblem {
        &self.dp
    }

    pub fn graph(&self) -> &DependencyGraph {
        &self.graph
    }

    /// Number of SCCs, trivial ones included.
    pub fn scc_count(&self) -> usize {
        self.caches.len()
    }

    /// `dh(t♯, →_{P_rank/R})`.
    pub fn relative_height(&mut self, rank: usize, t: &Term) -> Result<usize, RewriteError> {
        let ts = sharp(&self.trs, t);
        self.caches[rank - 1].dh(&ts)
    }

    /// `rk(t)`: the highest rank whose SCC can still fire on `t♯` after
    /// `R`-steps, or `None` when `t♯` is normal for every `P/R`.
    pub fn rank(&mut self, t: &Term) -> Result<Option<usize>, RewriteError> {
        for rank in (1..=self.caches.len()).rev() {
            if self.relative_height(rank, t)? > 0 {
                return Ok(Some(rank));
            }
        }
        Ok(None)
    }

    pub fn get(&mut self, t: &Term) -> Result<SccHeight, RewriteError> {
        if let Some(h) = self.memo.get(t) {
            return Ok(*h);
        }
        let h = match self.rank(t)? {
            Some(i) => SccHeight::new(i, self.relative_height(i, t)?),
            None if t.root().is_some_and(|f| self.trs.is_defined(f)) => SccHeight::new(0, 1),
            None => SccHeight::new(0, 0),
        };
        self.memo.insert(t.clone(), h);
        Ok(h)
    }
}

/// `sccheight(t)` with SCCs and ranks taken from `dg`.
pub fn sccheight(trs: &Trs, dg: &DependencyGraph, t: &Term, budget: usize) -> Result<SccHeight, SimError> {
    Ok(SccHeights::with_graph(trs, dg, budget).get(t)?)
}

/// Parameters of the generated system.
#[derive(Clone, Debug)]
pub struct SimParams {
    /// arity bound; `g_i` has `a + 1` arguments
    pub a: usize,
    /// branching constant
    pub c: usize,
    /// number of SCCs
    pub k: usize,
    /// rules computing `f` on numerals over `s`/`0`
    pub f_rules: Trs,
}

impl SimParams {
    /// `a = max(2, max arity)`, `C` the branching constant and `k` the SCC
    /// count of the estimated graph. Arity 1 is raised to 2 because `d_1` is
    /// the identity and `size` would then not bound term size. Without pairs
    /// `k` is 1; only `g_0` then occurs in encodings.
    pub fn for_trs(trs: &Trs, f_rules: Trs) -> Self {
        let graph = estimated_dependency_graph(&dependency_pairs(trs));
        SimParams {
            a: trs.max_arity().max(2),
            c: trs.branching_constant(),
            k: graph.sccs.len().max(1),
            f_rules,
        }
    }
}

/// The constant `f` at the largest `sccheight` height over all subterms of
/// `terms`, which suffices to simulate steps between those terms.
pub fn f_for_terms<'a>(h: &mut SccHeights, terms: impl IntoIterator<Item = &'a Term>) -> Result<Trs, SimError> {
    let mut max = 1;
    for t in terms {
        for p in t.positions() {
            max = max.max(h.get(t.get(&p).expect("own position"))?.height);
        }
    }
    Ok(f_constant(max))
}

/// `f(n) = c0`.
pub fn f_constant(c0: usize) -> Trs {
    let r = Rule::new(Term::app("f", vec![Term::var("x")]), numeral(c0)).expect("well formed");
    Trs::new(vec![r]).expect("well formed")
}

/// `f(n) = c1·n + c0` by recursion on the numeral.
pub fn f_linear(c1: usize, c0: usize) -> Trs {
    let x = Term::var("x");
    let fx = Term::app("f", vec![x.clone()]);
    let rules = vec![
        Rule::new(Term::app("f", vec![Term::constant("0")]), numeral(c0)).expect("well formed"),
        Rule::new(
            Term::app("f", vec![Term::app("s", vec![x])]),
            Term::iterate("s", c1, fx),
        )
        .expect("well formed"),
    ];
    Trs::new(rules).expect("well formed")
}

/// `s^n(0)`
pub fn numeral(n: usize) -> Term {
    Term::iterate("s", n, Term::constant("0"))
}

/// `n` for `s^n(0)`.
pub fn numeral_value(t: &Term) -> Option<usize> {
    let mut n = 0;
    let mut cur = t;
    loop {
        match cur.root().map(|f| &**f) {
            Some("0") if cur.args().is_empty() => return Some(n),
            Some("s") if cur.args().len() == 1 => {
                n += 1;
                cur = &cur.args()[0];
            }
            _ => return None,
        }
    }
}

pub fn g_name(i: usize) -> String {
    format!("g_{i}")
}

/// `i` for a symbol `g_i`.
pub fn g_index(f: &str) -> Option<usize> {
    f.strip_prefix("g_")?.parse().ok()
}

pub const SIZE: &str = "size";
pub const DOUBLE: &str = "d_a";
pub const FILL: &str = "c";
pub const SEED: &str = "g";
pub const START: &str = "z";

fn sim_symbol(f: &str) -> bool {
    g_index(f).is_some() || [SIZE, DOUBLE, FILL, SEED, START].contains(&f)
}

/// The generated system together with the index of every schema instance.
#[derive(Clone, Debug)]
pub struct SimSystem {
    pub params: SimParams,
    pub trs: Trs,
    rule1: Vec<usize>,
    rule2: Vec<usize>,
    rule3: Vec<Vec<usize>>,
    rule4: usize,
    rule5: usize,
    rule6: usize,
    rule7: usize,
    rule8: Vec<Vec<usize>>,
    rule9: usize,
    rule10: usize,
    f_offset: usize,
}

impl SimSystem {
    pub fn new(params: SimParams) -> Result<Self, SimError> {
        let SimParams { a, c, k, .. } = params;
        if a < 1 || c < 1 || k < 1 {
            return Err(SimError::BadParams(format!("need a ≥ 1, C ≥ 1, k ≥ 1 (got a={a}, C={c}, k={k})")));
        }
        if let Some(f) = params.f_rules.defined().iter().find(|f| sim_symbol(f) || ***f == *"s" || ***f == *"0") {
            return Err(SimError::BadParams(format!("f_rules define reserved symbol {f}")));
        }
        if let Some(f) = params.f_rules.signature().keys().find(|f| sim_symbol(f)) {
            return Err(SimError::BadParams(format!("f_rules use reserved symbol {f}")));
        }
        if params.f_rules.arity("f") != Some(1) || !params.f_rules.is_defined("f") {
            return Err(SimError::BadParams("f_rules must define the unary symbol f".into()));
        }

        let x = Term::var("x");
        let xs: Vec<Term> = (1..=a).map(|j| Term::var(&format!("x{j}"))).collect();
        let g = |i: usize, first: Term, rest: Vec<Term>| {
            let mut args = vec![first];
            args.extend(rest);
            Term::app(&g_name(i), args)
        };
        let s = |t: Term| Term::app("s", vec![t]);
        let zero = Term::constant("0");
        let fill = Term::constant(FILL);
        let restart = |args: Vec<Term>| {
            Term::app(
                "f",
                vec![Term::app(SIZE, vec![g(0, zero.clone(), args)])],
            )
        };

        let mut rules = Vec::new();
        let mut add = |l: Term, r: Term| -> Result<usize, SimError> {
            rules.push(Rule::new(l, r)?);
            Ok(rules.len() - 1)
        };
        let rule1 = (0..=k)
            .map(|i| add(g(i, s(x.clone()), xs.clone()), m_term(i, c, &x, &xs)))
            .collect::<Result<Vec<_>, _>>()?;
        let rule2 = (1..=k)
            .map(|i| add(g(i, x.clone(), xs.clone()), g(i - 1, restart(xs.clone()), xs.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let rule3 = (0..=k)
            .map(|i| {
                (0..a)
                    .map(|j| {
                        add(
                            Term::app(SIZE, vec![g(i, x.clone(), xs.clone())]),
                            Term::app(DOUBLE, vec![Term::app(SIZE, vec![xs[j].clone()])]),
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rule4 = add(Term::app(SIZE, vec![fill.clone()]), s(zero.clone()))?;
        let rule5 = add(
            Term::app(DOUBLE, vec![s(x.clone())]),
            Term::iterate("s", a, Term::app(DOUBLE, vec![x.clone()])),
        )?;
        let rule6 = add(Term::app(DOUBLE, vec![zero.clone()]), zero.clone())?;
        let rule7 = add(g(0, x.clone(), xs.clone()), fill.clone())?;
        let rule8 = (0..=k)
            .map(|i| {
                (0..a)
                    .map(|j| add(g(i, x.clone(), xs.clone()), xs[j].clone()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let xcopies = vec![x.clone(); a];
        let rule9 = add(
            Term::app(SEED, vec![x.clone()]),
            g(k, restart(xcopies.clone()), xcopies),
        )?;
        let fills = vec![fill.clone(); a];
        let rule10 = add(Term::constant(START), g(k, restart(fills.clone()), fills))?;
        let f_offset = rules.len();
        rules.extend(params.f_rules.rules().iter().cloned());
        let trs = Trs::new(rules)?;
        Ok(SimSystem {
            params,
            trs,
            rule1,
            rule2,
            rule3,
            rule4,
            rule5,
            rule6,
            rule7,
            rule8,
            rule9,
            rule10,
            f_offset,
        })
    }

    /// Number of schema rules, `f_rules` excluded.
    pub fn schema_len(&self) -> usize {
        self.f_offset
    }

    pub fn rule1(&self, i: usize) -> usize {
        self.rule1[i]
    }
    /// `2_{i}` for `1 ≤ i ≤ k`.
    pub fn rule2(&self, i: usize) -> usize {
        self.rule2[i - 1]
    }
    /// `3_{i,j}` with `j` 1-based.
    pub fn rule3(&self, i: usize, j: usize) -> usize {
        self.rule3[i][j - 1]
    }
    pub fn rule4(&self) -> usize {
        self.rule4
    }
    pub fn rule5(&self) -> usize {
        self.rule5
    }
    pub fn rule6(&self) -> usize {
        self.rule6
    }
    pub fn rule7(&self) -> usize {
        self.rule7
    }
    /// `8_{i,j}` with `j` 1-based.
    pub fn rule8(&self, i: usize, j: usize) -> usize {
        self.rule8[i][j - 1]
    }
    pub fn rule9(&self) -> usize {
        self.rule9
    }
    pub fn rule10(&self) -> usize {
        self.rule10
    }
    pub fn f_offset(&self) -> usize {
        self.f_offset
    }

    /// Schema label of rule `idx`, e.g. `"3_{1,2}"` or `"f#1"`.
    pub fn label(&self, idx: usize) -> String {
        let find2 = |v: &[Vec<usize>]| {
            v.iter()
                .enumerate()
                .find_map(|(i, row)| row.iter().position(|&r| r == idx).map(|j| (i, j + 1)))
        };
        if let Some(i) = self.rule1.iter().position(|&r| r == idx) {
            format!("1_{i}")
        } else if let Some(i) = self.rule2.iter().position(|&r| r == idx) {
            format!("2_{}", i + 1)
        } else if let Some((i, j)) = find2(&self.rule3) {
            format!("3_{{{i},{j}}}")
        } else if let Some((i, j)) = find2(&self.rule8) {
            format!("8_{{{i},{j}}}")
        } else if idx == self.rule4 {
            "4".into()
        } else if idx == self.rule5 {
            "5".into()
        } else if idx == self.rule6 {
            "6".into()
        } else if idx == self.rule7 {
            "7".into()
        } else if idx == self.rule9 {
            "9".into()
        } else if idx == self.rule10 {
            "10".into()
        } else {
            format!("f#{}", idx - self.f_offset + 1)
        }
    }
}

/// `M^j_i(x, x1, …, xa)`
pub fn m_term(i: usize, j: usize, x: &Term, xs: &[Term]) -> Term {
    let mut args = vec![x.clone()];
    if j == 0 {
        args.extend(xs.iter().cloned());
    } else {
        let inner = m_term(i, j - 1, x, xs);
        args.extend(std::iter::repeat(inner).take(xs.len()));
    }
    Term::app(&g_name(i), args)
}

/// The schema rules `1_i … 10` followed by `f_rules`.
pub fn generate_sim_trs(p: &SimParams) -> Result<Trs, SimError> {
    Ok(SimSystem::new(p.clone())?.trs)
}

/// `tr(t) = g_i(s^l(0), tr(t1), …, tr(tn), c, …, c)` for `sccheight(t) = (i,l)`,
/// padded to `a + 1` arguments.
pub fn tr_encode_with(h: &mut SccHeights, a: usize, t: &Term) -> Result<Term, SimError> {
    if !t.is_ground() {
        return Err(SimError::NotGround(t.to_string()));
    }
    if t.args().len() > a {
        return Err(SimError::BadParams(format!("{t} has more than a = {a} arguments")));
    }
    let sh = h.get(t)?;
    let mut args = vec![numeral(sh.height)];
    for u in t.args() {
        args.push(tr_encode_with(h, a, u)?);
    }
    while args.len() < a + 1 {
        args.push(Term::constant(FILL));
    }
    Ok(Term::app(&g_name(sh.rank), args))
}

/// `tr(t)` with `a = max(2, max arity of trs)`.
pub fn tr_encode(trs: &Trs, dg: &DependencyGraph, t: &Term, budget: usize) -> Result<Term, SimError> {
    let mut h = SccHeights::with_graph(trs, dg, budget);
    tr_encode_with(&mut h, trs.max_arity().max(2), t)
}

/// `s ≈ t`: equal shape of `g`-nodes and `c`-leaves, with the index and
/// numeral of every `g`-node free.
pub fn approx(s: &Term, t: &Term) -> bool {
    let fill = |u: &Term| u.root().is_some_and(|f| &**f == FILL) && u.args().is_empty();
    if fill(s) || fill(t) {
        return fill(s) && fill(t);
    }
    let g_node = |u: &Term| {
        u.root().and_then(|f| g_index(f)).is_some() && u.args().first().and_then(numeral_value).is_some()
    };
    g_node(s)
        && g_node(t)
        && s.args().len() == t.args().len()
        && s.args()[1..].iter().zip(&t.args()[1..]).all(|(x, y)| approx(x, y))
}

/// Monotonicity of `sccheight` along a single step: for every
/// `p ∈ Pos(s)` and progeny `q`, `sccheight(s|p) ≥ sccheight(t|q)`, strictly
/// at the redex. Returns violation descriptions.
pub fn rank_monotonicity_violations(
    h: &mut SccHeights,
    step: &crate::rewrite::RewriteStep,
) -> Result<(usize, Vec<String>), SimError> {
    let trs = h.trs().clone();
    let mut checked = 0;
    let mut violations = Vec::new();
    for p in step.source.positions() {
        let sp = step.source.get(&p).expect("own position");
        let before = h.get(sp)?;
        let qs = crate::progeny::progenies_of_step(&trs, step, &p)
            .map_err(|e| SimError::SimulationFailed { step: 0, reason: e.to_string() })?;
        for q in qs {
            checked += 1;
            let after = h.get(step.target.get(&q).expect("progeny position exists"))?;
            let ok = match before.cmp(&after) {
                Ordering::Greater => true,
                Ordering::Equal => p != step.redex,
                Ordering::Less => false,
            };
            if !ok {
                violations.push(format!(
                    "{} @{p:?} {before} vs {} @{q:?} {after}",
                    step.source, step.target
                ));
            }
        }
    }
    Ok((checked, violations))
}
