//! Dependency pairs, argument filterings, the estimated dependency graph with
//! SCC ranks, and usable rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::rewrite::{one_step_reducts, redexes};
use crate::term::{mark, match_term, sym, unify, GroundEnumerator, Position, Rule, Sym, Term, Trs};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("argument filtering has no entry for `{symbol}`")]
    MissingFilterEntry { symbol: String },
    #[error("bad filter entry for `{symbol}`: {reason}")]
    BadFilter { symbol: String, reason: String },
}

/// `DP(R)` together with where each pair came from.
#[derive(Clone, Debug)]
pub struct DpProblem {
    pub base: Trs,
    pub pairs: Vec<Rule>,
    /// `(rule index, position of u in r)` per pair.
    pub origins: Vec<(usize, Position)>,
    pub marked_signature: BTreeMap<Sym, usize>,
}

impl DpProblem {
    /// The pairs as a rewrite system over marked symbols.
    pub fn pairs_trs(&self) -> Trs {
        self.subset(&(0..self.pairs.len()).collect::<Vec<_>>())
    }

    /// The pairs with the given indices as a rewrite system.
    pub fn subset(&self, members: &[usize]) -> Trs {
        let rules = members.iter().map(|&i| self.pairs[i].clone()).collect();
        let sig = self.marked_signature.iter().map(|(f, n)| (f.clone(), *n));
        Trs::with_symbols(rules, sig).expect("pairs use the marked signature")
    }
}

/// `DP(R) = { l♯ → u♯ | l → r ∈ R, u ⊴ r, root(u) ∈ D, u ⋪ l }`, in rule
/// order and then position order of `u` within `r`.
pub fn dependency_pairs(trs: &Trs) -> DpProblem {
    let mut pairs = Vec::new();
    let mut origins = Vec::new();
    for (i, rule) in trs.rules().iter().enumerate() {
        for p in rule.rhs.positions() {
            let u = rule.rhs.get(&p).expect("own position");
            let defined = u.root().is_some_and(|f| trs.is_defined(f));
            if defined && !rule.lhs.has_proper_subterm(u) {
                pairs.push(Rule {
                    lhs: rule.lhs.marked(),
                    rhs: u.marked(),
                });
                origins.push((i, p));
            }
        }
    }
    let mut marked_signature = trs.signature().clone();
    for (f, n) in trs.signature() {
        marked_signature.insert(mark(f), *n);
    }
    DpProblem {
        base: trs.clone(),
        pairs,
        origins,
        marked_signature,
    }
}

/// `t♯`: marks the root when it is a defined symbol of `trs`.
pub fn sharp(trs: &Trs, t: &Term) -> Term {
    match t.root() {
        Some(f) if trs.is_defined(f) => t.marked(),
        _ => t.clone(),
    }
}

/// Per-symbol entry of an argument filtering (indices are 1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filter {
    Collapse(usize),
    Keep(Vec<usize>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArgumentFiltering(BTreeMap<Sym, Filter>);

impl ArgumentFiltering {
    /// Builds a filtering and checks each entry against `signature`.
    pub fn new(
        entries: impl IntoIterator<Item = (Sym, Filter)>,
        signature: &BTreeMap<Sym, usize>,
    ) -> Result<Self, DpError> {
        let map: BTreeMap<Sym, Filter> = entries.into_iter().collect();
        for (f, e) in &map {
            let bad = |reason: String| DpError::BadFilter {
                symbol: f.to_string(),
                reason,
            };
            let n = signature
                .get(f)
                .copied()
                .ok_or_else(|| bad("symbol not in signature".into()))?;
            match e {
                Filter::Collapse(i) if *i < 1 || *i > n => {
                    return Err(bad(format!("index {i} outside 1..={n}")))
                }
                Filter::Keep(is) => {
                    if is.iter().any(|i| *i < 1 || *i > n) {
                        return Err(bad(format!("index outside 1..={n}")));
                    }
                    if is.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(bad("list not strictly increasing".into()));
                    }
                }
                _ => {}
            }
        }
        Ok(ArgumentFiltering(map))
    }

    pub fn get(&self, f: &str) -> Option<&Filter> {
        self.0.get(f)
    }

    pub fn term(&self, t: &Term) -> Result<Term, DpError> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::App(f, args) => match self.0.get(f) {
                None => Err(DpError::MissingFilterEntry {
                    symbol: f.to_string(),
                }),
                Some(Filter::Collapse(i)) => self.term(&args[i - 1]),
                Some(Filter::Keep(is)) => Ok(Term::App(
                    f.clone(),
                    is.iter().map(|i| self.term(&args[i - 1])).collect::<Result<_, _>>()?,
                )),
            },
        }
    }

    /// `π(l) → π(r)`; the result may have a variable left-hand side, so it is
    /// built without the well-formedness check.
    pub fn rule(&self, r: &Rule) -> Result<Rule, DpError> {
        Ok(Rule {
            lhs: self.term(&r.lhs)?,
            rhs: self.term(&r.rhs)?,
        })
    }

    pub fn rules(&self, rs: &[Rule]) -> Result<Vec<Rule>, DpError> {
        rs.iter().map(|r| self.rule(r)).collect()
    }

    pub fn trs(&self, trs: &Trs) -> Result<Vec<Rule>, DpError> {
        self.rules(trs.rules())
    }

    /// Filters both the pairs and the base rules.
    pub fn problem(&self, dp: &DpProblem) -> Result<FilteredProblem, DpError> {
        Ok(FilteredProblem {
            pairs: self.rules(&dp.pairs)?,
            rules: self.trs(&dp.base)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredProblem {
    pub pairs: Vec<Rule>,
    pub rules: Vec<Rule>,
}

/// `s →= t` using the (possibly ill-formed) filtered rules.
pub fn step_or_equal(rules: &[Rule], s: &Term, t: &Term) -> bool {
    if s == t {
        return true;
    }
    s.positions().iter().any(|p| {
        let u = s.get(p).expect("own position");
        rules.iter().any(|r| {
            match_term(&r.lhs, u).is_some_and(|sig| {
                s.replace_at(p, r.rhs.apply(&sig)).is_ok_and(|v| &v == t)
            })
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Scc {
    pub members: Vec<usize>,
    pub trivial: bool,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: Vec<usize>,
    pub edges: BTreeSet<(usize, usize)>,
    /// Ordered by smallest member, which is the fixed SCC enumeration used
    /// to break ties between ranks.
    pub sccs: Vec<Scc>,
}

impl DependencyGraph {
    pub fn scc_of(&self, pair: usize) -> usize {
        self.sccs
            .iter()
            .position(|c| c.members.contains(&pair))
            .expect("sccs partition the nodes")
    }

    /// Rank of the SCC containing `pair`.
    pub fn pair_rank(&self, pair: usize) -> usize {
        self.sccs[self.scc_of(pair)].rank
    }

    /// SCC with the given rank.
    pub fn by_rank(&self, rank: usize) -> Option<&Scc> {
        self.sccs.iter().find(|c| c.rank == rank)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes,
            "edges": self.edges.iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
            "sccs": self.sccs,
        })
    }

    pub fn to_dot(&self, dp: &DpProblem) -> String {
        let mut s = String::from("digraph DG {\n");
        for &n in &self.nodes {
            let _ = writeln!(
                s,
                "  n{n} [label=\"{}: {}\\nrank {}\"];",
                n + 1,
                dp.pairs[n],
                self.pair_rank(n)
            );
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -> n{b};");
        }
        s.push_str("}\n");
        s
    }
}

/// `CAP`: replaces defined-rooted proper subterms by fresh variables.
fn cap(t: &Term, trs: &Trs, fresh: &mut usize, root: bool) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, _) if !root && trs.is_defined(f) => fresh_var(fresh),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| cap(a, trs, fresh, false)).collect()),
    }
}

/// `REN`: every variable occurrence becomes a distinct fresh variable.
fn ren(t: &Term, fresh: &mut usize) -> Term {
    match t {
        Term::Var(_) => fresh_var(fresh),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| ren(a, fresh)).collect()),
    }
}

/// `?` is outside the identifier alphabet, so these never clash with user
/// variables.
fn fresh_var(n: &mut usize) -> Term {
    *n += 1;
    Term::Var(sym(&format!("?{n}")))
}

/// Whether the CAP/REN estimation connects `s → t` to `u → v`.
pub fn estimated_edge(trs: &Trs, from: &Rule, to: &Rule) -> bool {
    let mut fresh = 0;
    let capped = ren(&cap(&from.rhs, trs, &mut fresh, true), &mut fresh);
    unify(&capped, &to.lhs).is_some()
}

pub fn estimated_dependency_graph(dp: &DpProblem) -> DependencyGraph {
    let n = dp.pairs.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if estimated_edge(&dp.base, &dp.pairs[i], &dp.pairs[j]) {
                edges.insert((i, j));
            }
        }
    }
    graph_from_edges(n, edges)
}

/// SCC decomposition and the `rk'`/`rk` ranking for a graph on `0..n`.
pub fn graph_from_edges(n: usize, edges: BTreeSet<(usize, usize)>) -> DependencyGraph {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let ix: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for &(a, b) in &edges {
        g.add_edge(ix[a], ix[b], ());
    }
    let mut comps: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut m: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            m.sort();
            m
        })
        .collect();
    comps.sort();
    let mut comp_of = vec![0; n];
    for (c, m) in comps.iter().enumerate() {
        for &x in m {
            comp_of[x] = c;
        }
    }
    let k = comps.len();
    // successor components, then rk' by memoized recursion over the DAG
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for &(a, b) in &edges {
        if comp_of[a] != comp_of[b] {
            succ[comp_of[a]].insert(comp_of[b]);
        }
    }
    fn rk1(c: usize, succ: &[BTreeSet<usize>], memo: &mut [Option<usize>]) -> usize {
        if let Some(v) = memo[c] {
            return v;
        }
        let v = 1 + succ[c].iter().map(|&d| rk1(d, succ, memo)).max().unwrap_or(0);
        memo[c] = Some(v);
        v
    }
    let mut memo = vec![None; k];
    let rk1s: Vec<usize> = (0..k).map(|c| rk1(c, &succ, &mut memo)).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&c| (rk1s[c], c));
    let mut rank = vec![0; k];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r + 1;
    }
    let sccs = comps
        .into_iter()
        .enumerate()
        .map(|(c, members)| {
            let trivial = members.len() == 1 && !edges.contains(&(members[0], members[0]));
            Scc {
                members,
                trivial,
                rank: rank[c],
            }
        })
        .collect();
    DependencyGraph {
        nodes: (0..n).collect(),
        edges,
        sccs,
    }
}

/// The two projection rules over the fresh symbol `c_e#cons`.
pub fn ce_rules() -> [Rule; 2] {
    let x = Term::var("x");
    let y = Term::var("y");
    let c = Term::app("c_e#cons", vec![x.clone(), y.clone()]);
    [
        Rule { lhs: c.clone(), rhs: x },
        Rule { lhs: c, rhs: y },
    ]
}

#[derive(Clone, Debug)]
pub struct UsableRules {
    /// Indices into the base system, ascending.
    pub usable: Vec<usize>,
    pub ce: [Rule; 2],
    pub exact_check: Option<bool>,
}

impl UsableRules {
    /// `U(DP(R))` as a rewrite system.
    pub fn trs(&self, dp: &DpProblem) -> Trs {
        let rules = self.usable.iter().map(|&i| dp.base.rules()[i].clone()).collect();
        Trs::new(rules).expect("subset of a well-formed system")
    }

    /// `U(DP(R)) ∪ Ce`
    pub fn with_ce(&self, dp: &DpProblem) -> Trs {
        let mut rules: Vec<Rule> = self.usable.iter().map(|&i| dp.base.rules()[i].clone()).collect();
        rules.extend(self.ce.iter().cloned());
        Trs::new(rules).expect("usable rules plus projections are well formed")
    }
}

/// Syntactic closure: a rule is usable if its root occurs in a pair's
/// right-hand side or in the right-hand side of a usable rule.
pub fn usable_rules(dp: &DpProblem) -> UsableRules {
    usable_rules_for(dp, &(0..dp.pairs.len()).collect::<Vec<_>>())
}

/// `U(P)` for a subset of the pairs.
pub fn usable_rules_for(dp: &DpProblem, pairs: &[usize]) -> UsableRules {
    let mut symbols: BTreeSet<Sym> = pairs.iter().flat_map(|&i| dp.pairs[i].rhs.symbols()).collect();
    let mut usable = BTreeSet::new();
    loop {
        let before = usable.len();
        for (i, r) in dp.base.rules().iter().enumerate() {
            if symbols.contains(r.root()) && usable.insert(i) {
                symbols.extend(r.rhs.symbols());
            }
        }
        if usable.len() == before {
            break;
        }
    }
    UsableRules {
        usable: usable.into_iter().collect(),
        ce: ce_rules(),
        exact_check: None,
    }
}

/// Rules that actually fire when rewriting right-hand sides of pairs
/// instantiated with ground normal forms of size ≤ `max_size`; the
/// exploration stops after `budget` distinct terms per instance.
pub fn usable_witnesses(dp: &DpProblem, max_size: usize, budget: usize) -> BTreeSet<usize> {
    let mut en = GroundEnumerator::new(dp.base.signature());
    let normal: Vec<Term> = (1..=max_size)
        .flat_map(|n| en.of_size(n))
        .filter(|t| redexes(&dp.base, t).is_empty())
        .collect();
    let mut seen = BTreeSet::new();
    for pair in &dp.pairs {
        let vars = pair.rhs.vars();
        let pools: Vec<Vec<Term>> = vars.iter().map(|_| normal.clone()).collect();
        crate::term::cartesian(&pools, &mut |vals| {
            let sigma = vars.iter().cloned().zip(vals.iter().cloned()).collect();
            let start = pair.rhs.apply(&sigma);
            let mut frontier = vec![start.clone()];
            let mut visited: BTreeSet<Term> = [start].into_iter().collect();
            while let Some(u) = frontier.pop() {
                for step in one_step_reducts(&dp.base, &u) {
                    seen.insert(step.rule_index);
                    if visited.len() < budget && visited.insert(step.target.clone()) {
                        frontier.push(step.target);
                    }
                }
            }
        });
    }
    seen
}

/// [`usable_rules`] plus the bounded search confirming that every rule that
/// fires is in the syntactic set.
pub fn usable_rules_checked(dp: &DpProblem, max_size: usize, budget: usize) -> UsableRules {
    let mut u = usable_rules(dp);
    let w = usable_witnesses(dp, max_size, budget);
    u.exact_check = Some(w.iter().all(|i| u.usable.contains(i)));
    u
}

/// Pairs `(i, j)` linked by a concrete chain `t_i σ →* u_j τ`, found by
/// instantiating with ground terms of size ≤ `max_size`.
pub fn witnessed_edges(dp: &DpProblem, max_size: usize, budget: usize) -> BTreeSet<(usize, usize)> {
    let mut en = GroundEnumerator::new(dp.base.signature());
    let ground: Vec<Term> = (1..=max_size).flat_map(|n| en.of_size(n)).collect();
    let mut out = BTreeSet::new();
    for (i, pi) in dp.pairs.iter().enumerate() {
        let vars = pi.rhs.vars();
        let pools: Vec<Vec<Term>> = vars.iter().map(|_| ground.clone()).collect();
        crate::term::cartesian(&pools, &mut |vals| {
            let sigma = vars.iter().cloned().zip(vals.iter().cloned()).collect();
            let start = pi.rhs.apply(&sigma);
            let mut frontier = vec![start.clone()];
            let mut visited: BTreeSet<Term> = [start].into_iter().collect();
            while let Some(u) = frontier.pop() {
                for (j, pj) in dp.pairs.iter().enumerate() {
                    if match_term(&pj.lhs, &u).is_some() {
                        out.insert((i, j));
                    }
                }
                for step in one_step_reducts(&dp.base, &u) {
                    if visited.len() < budget && visited.insert(step.target.clone()) {
                        frontier.push(step.target);
                    }
                }
            }
        });
    }
    out
}
