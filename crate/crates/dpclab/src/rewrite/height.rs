//! Derivation heights, relative derivation heights and potential depth/size.
//!
//! Two engines compute the same numbers:
//!
//! * the graph engine explores the full reachability graph, condenses it into
//!   strongly connected components and takes a longest path;
//! * the root-step engine, used for left-linear systems, splits every
//!   derivation at its first root step. Arguments are matched against
//!   left-hand sides through their *earliest* instances (see [`Engine::em`]),
//!   so only the reducts that can still enable a root step get explored.
//!   This keeps `dh(f(s³(0)))` over `f(s(x)) → s(f(f(x))), f(x) → c(x,x)`
//!   tractable even though its reachability set is astronomically large.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use petgraph::graph::{DiGraph, NodeIndex};

use super::{one_step_reducts, RewriteError};
use crate::term::{Substitution, Sym, Term, Trs};

/// Default cap on explored terms per query.
pub const DEFAULT_BUDGET: usize = 200_000;

const STACK_BYTES: usize = 512 << 20;

/// Runs `f` on a thread with a large stack; the engines recurse along
/// derivations.
pub(crate) fn on_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, f)
            .expect("spawn height worker")
            .join()
            .expect("height worker panicked")
    })
}

enum Stop {
    /// Re-entered a term that is still being evaluated.
    Cycle(Term),
    /// Same, but in the strict layer of a relative computation.
    StrictCycle(Term),
    Budget,
}

type Matches = Arc<Vec<(Substitution, usize)>>;

fn rules_by_root(trs: &Trs) -> HashMap<Sym, Vec<usize>> {
    let mut m: HashMap<Sym, Vec<usize>> = HashMap::new();
    for (i, r) in trs.rules().iter().enumerate() {
        m.entry(r.root().clone()).or_default().push(i);
    }
    m
}

/// Root-step engine over a left-linear system `r`.
struct Engine {
    r: Trs,
    by_root: HashMap<Sym, Vec<usize>>,
    /// Track step counts (needed for `dh`, not for relative heights).
    lengths: bool,
    budget: usize,
    explored: usize,
    dh_memo: HashMap<Term, usize>,
    dh_active: HashSet<Term>,
    em_memo: HashMap<(Term, Term), Matches>,
    em_active: HashSet<(Term, Term)>,
}

impl Engine {
    fn new(r: &Trs, lengths: bool, budget: usize) -> Self {
        Engine {
            r: r.clone(),
            by_root: rules_by_root(r),
            lengths,
            budget,
            explored: 0,
            dh_memo: HashMap::new(),
            dh_active: HashSet::new(),
            em_memo: HashMap::new(),
            em_active: HashSet::new(),
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.explored += 1;
        if self.explored > self.budget {
            Err(Stop::Budget)
        } else {
            Ok(())
        }
    }

    /// Earliest matches of the linear pattern `p` in reducts of `u`.
    ///
    /// Returns pairs `(σ, k)` with `u →^k p·σ`, such that for every
    /// derivation `u →^K p·τ` some returned `(σ, k)` has `σ(x) →* τ(x)` for
    /// all `x` and `K ≤ k + Σ_x |σ(x) →* τ(x)|`. Steps spent on subterms that
    /// a root step erases are folded into `k` via `dh`.
    fn em(&mut self, u: &Term, p: &Term) -> Result<Matches, Stop> {
        if let Term::Var(x) = p {
            let s: Substitution = [(x.clone(), u.clone())].into_iter().collect();
            return Ok(Arc::new(vec![(s, 0)]));
        }
        let key = (u.clone(), p.clone());
        if let Some(m) = self.em_memo.get(&key) {
            return Ok(m.clone());
        }
        if !self.em_active.insert(key.clone()) {
            return Err(Stop::Cycle(u.clone()));
        }
        let res = self.em_compute(u, p);
        self.em_active.remove(&key);
        let res = Arc::new(res?);
        self.em_memo.insert(key, res.clone());
        Ok(res)
    }

    fn em_compute(&mut self, u: &Term, p: &Term) -> Result<Vec<(Substitution, usize)>, Stop> {
        self.tick()?;
        let mut acc: HashMap<Substitution, usize> = HashMap::new();
        let (Term::App(f, us), Term::App(g, ps)) = (u, p) else {
            return Ok(Vec::new());
        };
        if f == g && us.len() == ps.len() {
            for (s, k) in self.em_args(us, ps)? {
                keep_max(&mut acc, s, k);
            }
        }
        for i in self.by_root.get(f).cloned().unwrap_or_default() {
            let rule = self.r.rules()[i].clone();
            for (tau, k1) in self.em_args(us, rule.lhs.args())? {
                let erased = self.erased_steps(&rule.erased_vars(), &tau)?;
                let next = rule.rhs.apply(&tau);
                for (s, k2) in self.em(&next, p)?.iter() {
                    keep_max(&mut acc, s.clone(), k1 + erased + 1 + k2);
                }
            }
        }
        let mut out: Vec<_> = acc.into_iter().collect();
        out.sort();
        Ok(out)
    }

    fn erased_steps(&mut self, erased: &[Sym], tau: &Substitution) -> Result<usize, Stop> {
        if !self.lengths {
            return Ok(0);
        }
        let mut n = 0;
        for x in erased {
            if let Some(t) = tau.get(x) {
                n += self.dh(&t.clone())?;
            }
        }
        Ok(n)
    }

    /// Component-wise product of earliest matches of `ps` in `us`.
    fn em_args(&mut self, us: &[Term], ps: &[Term]) -> Result<Vec<(Substitution, usize)>, Stop> {
        let mut combos = vec![(Substitution::new(), 0usize)];
        for (u, p) in us.iter().zip(ps) {
            let m = self.em(u, p)?;
            if m.is_empty() {
                return Ok(Vec::new());
            }
            let mut next: HashMap<Substitution, usize> = HashMap::new();
            for (s, k) in &combos {
                for (s2, k2) in m.iter() {
                    if let Some(merged) = s.merge(s2) {
                        keep_max(&mut next, merged, k + k2);
                    }
                }
            }
            combos = next.into_iter().collect();
            combos.sort();
        }
        Ok(combos)
    }

    /// `dh(t)`: either no root step ever happens (arguments are independent),
    /// or there is a first one, reached through earliest argument matches.
    fn dh(&mut self, t: &Term) -> Result<usize, Stop> {
        if let Some(&v) = self.dh_memo.get(t) {
            return Ok(v);
        }
        if !self.dh_active.insert(t.clone()) {
            return Err(Stop::Cycle(t.clone()));
        }
        let res = self.dh_compute(t);
        self.dh_active.remove(t);
        let v = res?;
        self.dh_memo.insert(t.clone(), v);
        Ok(v)
    }

    fn dh_compute(&mut self, t: &Term) -> Result<usize, Stop> {
        self.tick()?;
        let Term::App(f, us) = t else { return Ok(0) };
        let mut best = 0;
        for u in us {
            best += self.dh(u)?;
        }
        for i in self.by_root.get(f).cloned().unwrap_or_default() {
            let rule = self.r.rules()[i].clone();
            for (tau, k) in self.em_args(us, rule.lhs.args())? {
                let erased = self.erased_steps(&rule.erased_vars(), &tau)?;
                let rest = self.dh(&rule.rhs.apply(&tau))?;
                best = best.max(k + erased + 1 + rest);
            }
        }
        Ok(best)
    }
}

fn keep_max(acc: &mut HashMap<Substitution, usize>, s: Substitution, k: usize) {
    let e = acc.entry(s).or_insert(k);
    *e = (*e).max(k);
}

/// Exact derivation height `dh(t, →_R)`.
pub fn derivation_height(trs: &Trs, t: &Term, budget: usize) -> Result<usize, RewriteError> {
    HeightCache::new(trs, budget).dh(t)
}

/// Memoizing `dh` for repeated queries against one system.
pub struct HeightCache {
    trs: Trs,
    budget: usize,
    engine: Option<Engine>,
}

impl HeightCache {
    pub fn new(trs: &Trs, budget: usize) -> Self {
        let engine = trs.is_left_linear().then(|| Engine::new(trs, true, budget));
        HeightCache {
            trs: trs.clone(),
            budget,
            engine,
        }
    }

    pub fn dh(&mut self, t: &Term) -> Result<usize, RewriteError> {
        let budget = self.budget;
        match self.engine.as_mut() {
            None => derivation_height_graph(&self.trs, t, budget),
            Some(e) => {
                e.explored = 0;
                on_big_stack(|| e.dh(t)).map_err(|s| match s {
                    Stop::Cycle(u) | Stop::StrictCycle(u) => RewriteError::NonTerminating { term: u.to_string() },
                    Stop::Budget => RewriteError::BudgetExceeded { budget },
                })
            }
        }
    }
}

/// `dh` by exhaustive exploration of the reachability graph.
pub fn derivation_height_graph(trs: &Trs, t: &Term, budget: usize) -> Result<usize, RewriteError> {
    graph_height(trs, &Trs::empty(), t, budget).map_err(|e| match e {
        RewriteError::NonTerminatingRelative { term } => RewriteError::NonTerminating { term },
        other => other,
    })
}

/// Relative height `dh(t, →_{strict/weak})` by exhaustive exploration.
pub fn relative_height_graph(
    strict: &Trs,
    weak: &Trs,
    t: &Term,
    budget: usize,
) -> Result<usize, RewriteError> {
    graph_height(strict, weak, t, budget)
}

struct Reach {
    nodes: Vec<Term>,
    /// `(from, to, strict)`
    edges: Vec<(usize, usize, bool)>,
}

fn explore(strict: &Trs, weak: &Trs, t: &Term, budget: usize) -> Result<Reach, RewriteError> {
    let mut index: HashMap<Term, usize> = HashMap::new();
    let mut nodes = vec![t.clone()];
    index.insert(t.clone(), 0);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let u = nodes[i].clone();
        for (sys, is_strict) in [(strict, true), (weak, false)] {
            for step in one_step_reducts(sys, &u) {
                let j = match index.get(&step.target) {
                    Some(&j) => j,
                    None => {
                        if nodes.len() >= budget {
                            return Err(RewriteError::BudgetExceeded { budget });
                        }
                        index.insert(step.target.clone(), nodes.len());
                        nodes.push(step.target);
                        nodes.len() - 1
                    }
                };
                edges.push((i, j, is_strict));
            }
        }
        i += 1;
    }
    Ok(Reach { nodes, edges })
}

fn graph_height(strict: &Trs, weak: &Trs, t: &Term, budget: usize) -> Result<usize, RewriteError> {
    let reach = explore(strict, weak, t, budget)?;
    let mut g: DiGraph<(), bool> = DiGraph::new();
    let ix: Vec<NodeIndex> = reach.nodes.iter().map(|_| g.add_node(())).collect();
    for &(a, b, s) in &reach.edges {
        g.add_edge(ix[a], ix[b], s);
    }
    // components come out sinks first
    let sccs = petgraph::algo::tarjan_scc(&g);
    let mut comp = vec![0usize; reach.nodes.len()];
    for (c, members) in sccs.iter().enumerate() {
        for n in members {
            comp[n.index()] = c;
        }
    }
    let mut out_edges: Vec<Vec<(usize, bool)>> = vec![Vec::new(); reach.nodes.len()];
    for &(a, b, s) in &reach.edges {
        if s && comp[a] == comp[b] {
            return Err(RewriteError::NonTerminatingRelative {
                term: reach.nodes[a].to_string(),
            });
        }
        out_edges[a].push((b, s));
    }
    let mut value = vec![0usize; sccs.len()];
    for (c, members) in sccs.iter().enumerate() {
        let mut best = 0;
        for n in members {
            for &(b, s) in &out_edges[n.index()] {
                if comp[b] != c {
                    best = best.max(usize::from(s) + value[comp[b]]);
                }
            }
        }
        value[c] = best;
    }
    Ok(value[comp[0]])
}

/// Exact relative derivation height: the maximal number of `strict` steps in
/// any `strict ∪ weak` derivation from `t`.
pub fn relative_derivation_height(
    strict: &Trs,
    weak: &Trs,
    t: &Term,
    budget: usize,
) -> Result<usize, RewriteError> {
    RelativeCache::new(strict, weak, budget).dh(t)
}

/// Memoizing relative heights for one `strict / weak` pair.
///
/// When the strict rules have the dependency-pair shape (marked roots only,
/// linear left-hand sides, marks absent from `weak`) and `weak` is
/// left-linear, strict steps can only happen at the root, and the root-step
/// engine enumerates earliest argument matches instead of the whole
/// reachability set.
pub struct RelativeCache {
    strict: Trs,
    weak: Trs,
    budget: usize,
    marks: HashSet<Sym>,
    shaped: bool,
    strict_by_root: HashMap<Sym, Vec<usize>>,
    engine: Engine,
    memo: HashMap<Term, usize>,
    active: HashSet<Term>,
}

impl RelativeCache {
    pub fn new(strict: &Trs, weak: &Trs, budget: usize) -> Self {
        let marks: HashSet<Sym> = strict
            .rules()
            .iter()
            .flat_map(|r| [r.lhs.root().cloned(), r.rhs.root().cloned()])
            .flatten()
            .collect();
        let below_root_free = |t: &Term| t.args().iter().all(|a| a.symbols().iter().all(|f| !marks.contains(f)));
        let shaped = weak.is_left_linear()
            && strict.rules().iter().all(|r| {
                r.lhs.is_linear() && !r.rhs.is_var() && below_root_free(&r.lhs) && below_root_free(&r.rhs)
            })
            && weak
                .rules()
                .iter()
                .all(|r| r.lhs.symbols().iter().chain(r.rhs.symbols().iter()).all(|f| !marks.contains(f)));
        RelativeCache {
            strict: strict.clone(),
            weak: weak.clone(),
            budget,
            strict_by_root: rules_by_root(strict),
            marks,
            shaped,
            engine: Engine::new(weak, false, budget),
            memo: HashMap::new(),
            active: HashSet::new(),
        }
    }

    pub fn dh(&mut self, t: &Term) -> Result<usize, RewriteError> {
        let budget = self.budget;
        if self.shaped {
            let marks = &self.marks;
            let inner_clean = t.args().iter().all(|a| a.symbols().iter().all(|f| !marks.contains(f)));
            if !t.symbols().iter().any(|f| marks.contains(f)) {
                return Ok(0);
            }
            if inner_clean {
                self.engine.explored = 0;
                let res = on_big_stack(|| self.rel(t));
                match res {
                    Ok(v) => return Ok(v),
                    Err(Stop::StrictCycle(u)) => {
                        return Err(RewriteError::NonTerminatingRelative { term: u.to_string() })
                    }
                    Err(Stop::Budget) => return Err(RewriteError::BudgetExceeded { budget }),
                    Err(Stop::Cycle(_)) => {
                        // weak part loops; only the full graph can tell
                        self.shaped = false;
                        self.memo.clear();
                        self.active.clear();
                    }
                }
            }
        }
        graph_height(&self.strict, &self.weak, t, budget)
    }

    fn rel(&mut self, t: &Term) -> Result<usize, Stop> {
        if let Some(&v) = self.memo.get(t) {
            return Ok(v);
        }
        if !self.active.insert(t.clone()) {
            return Err(Stop::StrictCycle(t.clone()));
        }
        let res = self.rel_compute(t);
        self.active.remove(t);
        let v = res?;
        self.memo.insert(t.clone(), v);
        Ok(v)
    }

    fn rel_compute(&mut self, t: &Term) -> Result<usize, Stop> {
        self.engine.tick()?;
        let Term::App(f, us) = t else { return Ok(0) };
        let mut best = 0;
        for i in self.strict_by_root.get(f).cloned().unwrap_or_default() {
            let pair = self.strict.rules()[i].clone();
            for (sigma, _) in self.engine.em_args(us, pair.lhs.args())? {
                let next = pair.rhs.apply(&sigma);
                best = best.max(1 + self.rel(&next)?);
            }
        }
        Ok(best)
    }
}

fn reachable(trs: &Trs, t: &Term, budget: usize) -> Result<Vec<Term>, RewriteError> {
    let reach = explore(trs, &Trs::empty(), t, budget)?;
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let ix: Vec<NodeIndex> = reach.nodes.iter().map(|_| g.add_node(())).collect();
    for &(a, b, _) in &reach.edges {
        if a == b {
            return Err(RewriteError::NonTerminating {
                term: reach.nodes[a].to_string(),
            });
        }
        g.add_edge(ix[a], ix[b], ());
    }
    if let Some(c) = petgraph::algo::tarjan_scc(&g).into_iter().find(|c| c.len() > 1) {
        return Err(RewriteError::NonTerminating {
            term: reach.nodes[c[0].index()].to_string(),
        });
    }
    Ok(reach.nodes)
}

/// `pdp(t) = max{depth(u) | t →* u}`
pub fn potential_depth(trs: &Trs, t: &Term, budget: usize) -> Result<usize, RewriteError> {
    Ok(reachable(trs, t, budget)?.iter().map(Term::depth).max().unwrap_or(0))
}

/// `psz(t) = max{size(u) | t →* u}`
pub fn potential_size(trs: &Trs, t: &Term, budget: usize) -> Result<usize, RewriteError> {
    Ok(reachable(trs, t, budget)?.iter().map(Term::size).max().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_rules, parse_term, parse_term_with, parse_trs};

    fn rde() -> Trs {
        parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))) f(x) -> c(x,x))").unwrap()
    }

    fn rde_pairs() -> Trs {
        Trs::new(parse_rules("f#(s(x)) -> f#(f(x)) f#(s(x)) -> f#(x)", &["x"], true).unwrap()).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term_with(s, &[], true).unwrap()
    }

    #[test]
    fn rde_heights() {
        assert_eq!(derivation_height(&rde(), &t("f(s(0))"), DEFAULT_BUDGET), Ok(4));
        assert_eq!(derivation_height_graph(&rde(), &t("f(s(0))"), DEFAULT_BUDGET), Ok(4));
        assert_eq!(derivation_height(&rde(), &t("s(0)"), DEFAULT_BUDGET), Ok(0));
        // 2^n − 1 + 2^(2^n) − 1 at n = 2, 3
        assert_eq!(derivation_height(&rde(), &t("f(s(s(0)))"), DEFAULT_BUDGET), Ok(18));
        assert_eq!(derivation_height_graph(&rde(), &t("f(s(s(0)))"), DEFAULT_BUDGET), Ok(18));
        assert_eq!(derivation_height(&rde(), &t("f(s(s(s(0))))"), DEFAULT_BUDGET), Ok(262));
    }

    #[test]
    fn cycles() {
        let ab = parse_trs("(RULES a -> b b -> a)").unwrap();
        assert!(matches!(
            derivation_height(&ab, &t("a"), 100),
            Err(RewriteError::NonTerminating { .. })
        ));
        assert!(matches!(
            derivation_height_graph(&ab, &t("a"), 100),
            Err(RewriteError::NonTerminating { .. })
        ));
        let s = parse_trs("(RULES a -> b)").unwrap();
        let w = parse_trs("(RULES b -> a)").unwrap();
        assert!(matches!(
            relative_derivation_height(&s, &w, &t("a"), 100),
            Err(RewriteError::NonTerminatingRelative { .. })
        ));
        // weak-only cycle is fine
        let s = parse_trs("(RULES a -> c)").unwrap();
        assert_eq!(relative_derivation_height(&s, &w, &t("a"), 100), Ok(1));
    }

    #[test]
    fn budget() {
        let grow = parse_trs("(VAR x) (RULES f(x) -> f(s(x)))").unwrap();
        assert_eq!(
            derivation_height(&grow, &t("f(0)"), 50),
            Err(RewriteError::BudgetExceeded { budget: 50 })
        );
        assert_eq!(
            derivation_height_graph(&grow, &t("f(0)"), 50),
            Err(RewriteError::BudgetExceeded { budget: 50 })
        );
    }

    #[test]
    fn relative_rde() {
        let p = rde_pairs();
        assert_eq!(relative_derivation_height(&p, &rde(), &t("f#(s(s(0)))"), DEFAULT_BUDGET), Ok(2));
        assert_eq!(relative_height_graph(&p, &rde(), &t("f#(s(s(0)))"), DEFAULT_BUDGET), Ok(2));
        assert_eq!(relative_derivation_height(&p, &rde(), &t("f#(0)"), DEFAULT_BUDGET), Ok(0));
        for n in 0..=5 {
            let s = Term::App(crate::term::mark("f"), vec![Term::iterate("s", n, t("0"))]);
            let h = relative_derivation_height(&p, &rde(), &s, DEFAULT_BUDGET).unwrap();
            assert_eq!(h, n, "f#(s^{n}(0))");
        }
    }

    #[test]
    fn relative_with_empty_weak_is_plain() {
        let r = rde();
        for s in ["f(s(0))", "f(f(s(0)))", "c(f(s(0)),f(0))"] {
            assert_eq!(
                relative_derivation_height(&r, &Trs::empty(), &t(s), DEFAULT_BUDGET),
                derivation_height(&r, &t(s), DEFAULT_BUDGET)
            );
        }
    }

    #[test]
    fn potentials() {
        let rd = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))))").unwrap();
        assert_eq!(potential_depth(&rde(), &t("f(s(s(0)))"), DEFAULT_BUDGET), Ok(6));
        assert_eq!(potential_depth(&rd, &t("f(s(0))"), DEFAULT_BUDGET), Ok(3));
        assert_eq!(potential_depth(&rd, &t("s(0)"), DEFAULT_BUDGET), Ok(1));
        assert!(potential_size(&rde(), &t("f(s(0))"), DEFAULT_BUDGET).unwrap() >= 3);
    }

    #[test]
    fn erasing_rules_count_work_before_the_root_step() {
        // f(x, y) -> x erases y; reducing y first is strictly better
        let r = parse_trs("(VAR x y) (RULES f(x,y) -> x a -> b b -> c)").unwrap();
        let s = parse_term("f(a,a)", &[]).unwrap();
        assert_eq!(derivation_height(&r, &s, 100), derivation_height_graph(&r, &s, 100));
        assert_eq!(derivation_height(&r, &s, 100), Ok(5));
    }
}
