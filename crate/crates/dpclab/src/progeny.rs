//! Progenies and progenitors of positions along a derivation, main branches,
//! the progenitor graph, and implicit dependency pair derivations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::dp::{dependency_pairs, DpProblem};
use crate::rewrite::{Derivation, RewriteError, RewriteStep};
use crate::term::{Position, Rule, Term, Trs};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgenyError {
    #[error("position {pos} does not exist in {term}")]
    PositionOutOfRange { pos: String, term: String },
    #[error("position {pos} is not on the main branch of t{term}")]
    NotOnMainBranch { term: usize, pos: String },
    #[error("position {pos} of t{term} has {count} main progenitors in t{from}")]
    AmbiguousMainProgenitor {
        term: usize,
        from: usize,
        pos: String,
        count: usize,
    },
    #[error("no branch of t{term} meets every progenitor set")]
    NoMainBranch { term: usize },
    #[error("chain element {index} is not a progeny of its predecessor")]
    ChainNotProgenyLinked { index: usize },
    #[error("root of the subterm at {pos} of the last chain term is not defined")]
    UndefinedRoot { pos: String },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

fn out_of_range(t: &Term, p: &Position) -> ProgenyError {
    ProgenyError::PositionOutOfRange {
        pos: format!("{p:?}"),
        term: t.to_string(),
    }
}

enum Case {
    /// `p < p'` or `p ∥ p'`
    Context,
    /// `p = p'q1q2`, `q1 ∈ VPos(l)`
    Variable(Position, Position),
    /// `p = p'q1`, `q1 ∈ FPos(l) − {ε}`
    Inner(Position),
    /// `p = p'`
    Redex,
}

fn classify(lhs: &Term, redex: &Position, p: &Position) -> Case {
    if p == redex {
        return Case::Redex;
    }
    let Some(rest) = p.strip_prefix(redex) else {
        return Case::Context;
    };
    for q1 in rest.prefixes() {
        if lhs.get(&q1).is_some_and(Term::is_var) {
            let q2 = rest.strip_prefix(&q1).expect("prefix");
            return Case::Variable(q1, q2);
        }
    }
    Case::Inner(rest)
}

fn step_sets(rule: &Rule, step: &RewriteStep, p: &Position, descendants: bool) -> Result<BTreeSet<Position>, ProgenyError> {
    if !step.source.contains_position(p) {
        return Err(out_of_range(&step.source, p));
    }
    let (l, r, pr) = (&rule.lhs, &rule.rhs, &step.redex);
    let set = match classify(l, pr, p) {
        Case::Context => [p.clone()].into_iter().collect(),
        Case::Variable(q1, q2) => {
            let x = l.get(&q1).expect("variable position");
            r.var_positions()
                .into_iter()
                .filter(|q3| r.get(q3) == Some(x))
                .map(|q3| pr.concat(&q3).concat(&q2))
                .collect()
        }
        _ if descendants => BTreeSet::new(),
        Case::Inner(q1) => {
            let u = l.get(&q1).expect("function position");
            r.positions()
                .into_iter()
                .filter(|q2| r.get(q2) == Some(u))
                .map(|q2| pr.concat(&q2))
                .collect()
        }
        Case::Redex => r
            .fun_positions()
            .into_iter()
            .filter(|q1| !l.has_proper_subterm(r.get(q1).expect("own position")))
            .map(|q1| p.concat(&q1))
            .collect(),
    };
    Ok(set)
}

/// `child(p, A)` for a single step.
pub fn progenies_of_step(trs: &Trs, step: &RewriteStep, p: &Position) -> Result<BTreeSet<Position>, ProgenyError> {
    step_sets(&trs.rules()[step.rule_index], step, p, false)
}

/// `p \ A`: positions of `t` that are residuals of `p`.
pub fn descendants_of_step(trs: &Trs, step: &RewriteStep, p: &Position) -> Result<BTreeSet<Position>, ProgenyError> {
    step_sets(&trs.rules()[step.rule_index], step, p, true)
}

/// `anc(q, A)` for a single step.
pub fn progenitors_of_step(trs: &Trs, step: &RewriteStep, q: &Position) -> Result<BTreeSet<Position>, ProgenyError> {
    if !step.target.contains_position(q) {
        return Err(out_of_range(&step.target, q));
    }
    let mut out = BTreeSet::new();
    for p in step.source.positions() {
        if progenies_of_step(trs, step, &p)?.contains(q) {
            out.insert(p);
        }
    }
    Ok(out)
}

/// `child(p, A)` for a whole derivation, composed step by step.
pub fn progenies_of_derivation(trs: &Trs, d: &Derivation, p: &Position) -> Result<BTreeSet<Position>, ProgenyError> {
    if !d.initial.contains_position(p) {
        return Err(out_of_range(&d.initial, p));
    }
    let mut cur: BTreeSet<Position> = [p.clone()].into_iter().collect();
    for step in &d.steps {
        let mut next = BTreeSet::new();
        for p in &cur {
            next.extend(progenies_of_step(trs, step, p)?);
        }
        cur = next;
    }
    Ok(cur)
}

/// `anc(q, A)` for a whole derivation.
pub fn progenitors_of_derivation(trs: &Trs, d: &Derivation, q: &Position) -> Result<BTreeSet<Position>, ProgenyError> {
    let map = ProgenyMap::new(trs, d)?;
    if !d.last().contains_position(q) {
        return Err(out_of_range(d.last(), q));
    }
    Ok(map.progenitors(0, d.len(), &[q.clone()].into_iter().collect()))
}

/// Eager progeny relation of every step; step `k` relates `t_{k+1}` to
/// `t_{k+2}` (0-based term indices `k` and `k + 1`).
#[derive(Clone, Debug)]
pub struct ProgenyMap {
    pub children: Vec<BTreeMap<Position, BTreeSet<Position>>>,
    pub parents: Vec<BTreeMap<Position, BTreeSet<Position>>>,
}

impl ProgenyMap {
    pub fn new(trs: &Trs, d: &Derivation) -> Result<Self, ProgenyError> {
        let mut children = Vec::with_capacity(d.len());
        let mut parents = Vec::with_capacity(d.len());
        for step in &d.steps {
            let mut ch = BTreeMap::new();
            let mut pa: BTreeMap<Position, BTreeSet<Position>> =
                step.target.positions().into_iter().map(|q| (q, BTreeSet::new())).collect();
            for p in step.source.positions() {
                let set = progenies_of_step(trs, step, &p)?;
                for q in &set {
                    pa.entry(q.clone()).or_default().insert(p.clone());
                }
                ch.insert(p, set);
            }
            children.push(ch);
            parents.push(pa);
        }
        Ok(ProgenyMap { children, parents })
    }

    /// Progenies in term `to` of positions in term `from`.
    pub fn progenies(&self, from: usize, to: usize, ps: &BTreeSet<Position>) -> BTreeSet<Position> {
        (from..to).fold(ps.clone(), |cur, k| {
            cur.iter()
                .flat_map(|p| self.children[k].get(p).into_iter().flatten().cloned())
                .collect()
        })
    }

    /// Progenitors in term `from` of positions in term `to`.
    pub fn progenitors(&self, from: usize, to: usize, qs: &BTreeSet<Position>) -> BTreeSet<Position> {
        (from..to).rev().fold(qs.clone(), |cur, k| {
            cur.iter()
                .flat_map(|q| self.parents[k].get(q).into_iter().flatten().cloned())
                .collect()
        })
    }
}

/// The main branch of every term of a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainBranches(pub Vec<Vec<Position>>);

impl MainBranches {
    pub fn branch(&self, i: usize) -> &[Position] {
        &self.0[i]
    }

    pub fn contains(&self, i: usize, p: &Position) -> bool {
        self.0[i].contains(p)
    }
}

fn compute_main_branches(d: &Derivation, map: &ProgenyMap) -> Result<MainBranches, ProgenyError> {
    let terms = d.terms();
    let n = terms.len();
    let mut out = vec![Vec::new(); n];
    let last = terms[n - 1].branches();
    let longest = last.iter().map(Vec::len).max().unwrap_or(0);
    out[n - 1] = last.into_iter().find(|b| b.len() == longest).unwrap_or_default();
    for i in (0..n - 1).rev() {
        let anc: Vec<&BTreeSet<Position>> = out[i + 1].iter().map(|q| &map.parents[i][q]).collect();
        out[i] = terms[i]
            .branches()
            .into_iter()
            .find(|b| anc.iter().all(|a| b.iter().any(|p| a.contains(p))))
            .ok_or(ProgenyError::NoMainBranch { term: i + 1 })?;
    }
    Ok(MainBranches(out))
}

pub fn main_branches(trs: &Trs, d: &Derivation) -> Result<MainBranches, ProgenyError> {
    compute_main_branches(d, &ProgenyMap::new(trs, d)?)
}

/// A derivation with its progeny relation and main branches; all queries
/// take 0-based term indices.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub trs: Trs,
    pub derivation: Derivation,
    pub map: ProgenyMap,
    pub branches: MainBranches,
}

impl Analysis {
    pub fn new(trs: &Trs, d: &Derivation) -> Result<Self, ProgenyError> {
        let map = ProgenyMap::new(trs, d)?;
        let branches = compute_main_branches(d, &map)?;
        Ok(Analysis {
            trs: trs.clone(),
            derivation: d.clone(),
            map,
            branches,
        })
    }

    pub fn len(&self) -> usize {
        self.derivation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivation.is_empty()
    }

    pub fn term(&self, i: usize) -> &Term {
        self.derivation.term(i)
    }

    pub fn redex(&self, k: usize) -> &Position {
        &self.derivation.steps[k].redex
    }

    fn is_defined_at(&self, i: usize, p: &Position) -> bool {
        self.term(i)
            .get(p)
            .and_then(Term::root)
            .is_some_and(|f| self.trs.is_defined(f))
    }

    /// `mchild(p, t_i →* t_j)` with respect to the main branches.
    pub fn main_progenies(&self, i: usize, j: usize, p: &Position) -> BTreeSet<Position> {
        let mut cur: BTreeSet<Position> = [p.clone()].into_iter().collect();
        for k in i..j {
            cur = cur
                .iter()
                .filter(|p| self.branches.contains(k, p))
                .flat_map(|p| self.map.children[k][p].iter())
                .filter(|q| self.branches.contains(k + 1, q))
                .cloned()
                .collect();
        }
        cur
    }

    /// `manc(q, t_i →* t_j)`
    pub fn main_progenitors(&self, i: usize, j: usize, q: &Position) -> BTreeSet<Position> {
        let mut cur: BTreeSet<Position> = [q.clone()].into_iter().collect();
        for k in (i..j).rev() {
            cur = cur
                .iter()
                .filter(|q| self.branches.contains(k + 1, q))
                .flat_map(|q| self.map.parents[k][q].iter())
                .filter(|p| self.branches.contains(k, p))
                .cloned()
                .collect();
        }
        cur
    }

    /// The single main progenitor in `t_i` of `q ∈ B_j`.
    pub fn main_progenitor(&self, i: usize, j: usize, q: &Position) -> Result<Position, ProgenyError> {
        if !self.branches.contains(j, q) {
            return Err(ProgenyError::NotOnMainBranch {
                term: j + 1,
                pos: format!("{q:?}"),
            });
        }
        let set = self.main_progenitors(i, j, q);
        if set.len() != 1 {
            return Err(ProgenyError::AmbiguousMainProgenitor {
                term: j + 1,
                from: i + 1,
                pos: format!("{q:?}"),
                count: set.len(),
            });
        }
        Ok(set.into_iter().next().expect("singleton"))
    }

    pub fn is_node(&self, i: usize, p: &Position) -> bool {
        self.branches.contains(i, p)
            && self.is_defined_at(i, p)
            && (i == 0 || self.main_progenitor(i - 1, i, p).is_ok_and(|m| &m == self.redex(i - 1)))
    }

    pub fn progenitor_graph(&self) -> ProgenitorGraph {
        let mut nodes = BTreeSet::new();
        for i in 0..=self.len() {
            for p in self.branches.branch(i) {
                if self.is_node(i, p) {
                    nodes.insert(Node::new(i, p.clone()));
                }
            }
        }
        let mut edges = BTreeSet::new();
        for target in nodes.iter().filter(|n| n.term > 0) {
            let j = target.term;
            // walk back through main progenitors; the source is the first
            // node reached before any intermediate redex coincidence
            for i in (0..j).rev() {
                let Ok(m) = self.main_progenitor(i, j, &target.pos) else { break };
                if i < j - 1 && &m == self.redex(i) {
                    break;
                }
                let source = Node::new(i, m);
                if nodes.contains(&source) {
                    edges.insert((source, target.clone()));
                    break;
                }
            }
        }
        ProgenitorGraph { nodes, edges }
    }
}

/// `(t_i, p)` with `term` the 0-based index of `t_i`; displayed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub term: usize,
    pub pos: Position,
}

impl Node {
    pub fn new(term: usize, pos: Position) -> Self {
        Node { term, pos }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}@{}", self.term + 1, self.pos)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProgenitorGraph {
    pub nodes: BTreeSet<Node>,
    pub edges: BTreeSet<(Node, Node)>,
}

impl ProgenitorGraph {
    pub fn successors(&self, n: &Node) -> Vec<&Node> {
        self.edges.iter().filter(|(a, _)| a == n).map(|(_, b)| b).collect()
    }

    pub fn predecessors(&self, n: &Node) -> Vec<&Node> {
        self.edges.iter().filter(|(_, b)| b == n).map(|(a, _)| a).collect()
    }

    pub fn roots(&self) -> Vec<&Node> {
        self.nodes.iter().filter(|n| self.predecessors(n).is_empty()).collect()
    }

    pub fn is_forest(&self) -> bool {
        self.nodes.iter().all(|n| self.predecessors(n).len() <= 1)
            && self.edges.iter().all(|(a, b)| a.term < b.term)
    }

    pub fn max_out_degree(&self) -> usize {
        self.nodes.iter().map(|n| self.successors(n).len()).max().unwrap_or(0)
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        fn go(g: &ProgenitorGraph, n: &Node) -> usize {
            g.successors(n).into_iter().map(|m| 1 + go(g, m)).max().unwrap_or(0)
        }
        self.roots().into_iter().map(|r| go(self, r)).max().unwrap_or(0)
    }

    pub fn to_dot(&self) -> String {
        let ids: BTreeMap<&Node, usize> = self.nodes.iter().enumerate().map(|(k, n)| (n, k)).collect();
        let mut s = String::from("digraph PG {\n");
        for (n, k) in &ids {
            let _ = writeln!(s, "  n{k} [label=\"{n}\"];");
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  n{} -> n{};", ids[a], ids[b]);
        }
        s.push_str("}\n");
        s
    }

    /// `{nodes: [[i, "pos"]], edges: [[n, m]]}` with 1-based term indices and
    /// edges given as indices into `nodes`.
    pub fn to_json(&self) -> serde_json::Value {
        let ids: BTreeMap<&Node, usize> = self.nodes.iter().enumerate().map(|(k, n)| (n, k)).collect();
        serde_json::json!({
            "nodes": self.nodes.iter().map(|n| serde_json::json!([n.term + 1, n.pos.to_string()])).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|(a, b)| [ids[a], ids[b]]).collect::<Vec<_>>(),
        })
    }
}

pub fn progenitor_graph(trs: &Trs, d: &Derivation) -> Result<ProgenitorGraph, ProgenyError> {
    Ok(Analysis::new(trs, d)?.progenitor_graph())
}

/// A derivation over `R ∪ DP(R)` on marked terms. In `trs` the rules of `R`
/// come first, followed by the pairs.
#[derive(Clone, Debug)]
pub struct ImplicitDp {
    pub trs: Trs,
    pub derivation: Derivation,
    pub dpsize: usize,
    base_len: usize,
}

impl ImplicitDp {
    pub fn is_dp_step(&self, k: usize) -> bool {
        self.derivation.steps[k].rule_index >= self.base_len
    }
}

/// `R` followed by `DP(R)`, over the marked signature.
pub fn combined_trs(dp: &DpProblem) -> Trs {
    let mut rules = dp.base.rules().to_vec();
    rules.extend(dp.pairs.iter().cloned());
    let sig = dp.marked_signature.iter().map(|(f, n)| (f.clone(), *n));
    Trs::with_symbols(rules, sig).expect("base rules and pairs are well formed")
}

/// Builds `(t_{i1}|p1)♯ →* (t_{in}|pn)♯` for a chain of consecutive term
/// indices, re-deriving each step from the case of the progeny relation.
pub fn implicit_dp_derivation(trs: &Trs, d: &Derivation, chain: &[(usize, Position)]) -> Result<ImplicitDp, ProgenyError> {
    let dp = dependency_pairs(trs);
    implicit_dp_with(&dp, d, chain)
}

pub(crate) fn implicit_dp_with(dp: &DpProblem, d: &Derivation, chain: &[(usize, Position)]) -> Result<ImplicitDp, ProgenyError> {
    let trs = &dp.base;
    let combined = combined_trs(dp);
    let base_len = trs.len();
    let Some((i0, p0)) = chain.first() else {
        return Err(ProgenyError::ChainNotProgenyLinked { index: 0 });
    };
    let sharp = |i: usize, p: &Position| -> Result<Term, ProgenyError> {
        let t = d.term(i);
        let u = t.get(p).ok_or_else(|| out_of_range(t, p))?;
        Ok(crate::dp::sharp(trs, u))
    };
    let (in_, pn) = chain.last().expect("nonempty");
    let last = d.term(*in_).get(pn).ok_or_else(|| out_of_range(d.term(*in_), pn))?;
    if !last.root().is_some_and(|f| trs.is_defined(f)) {
        return Err(ProgenyError::UndefinedRoot {
            pos: format!("{pn:?}"),
        });
    }
    let mut out = Derivation::empty(sharp(*i0, p0)?);
    let mut dpsize = 0;
    for (k, w) in chain.windows(2).enumerate() {
        let ((i, p), (j, q)) = (&w[0], &w[1]);
        let broken = ProgenyError::ChainNotProgenyLinked { index: k + 1 };
        if *j != i + 1 || *i >= d.len() {
            return Err(broken);
        }
        let step = &d.steps[*i];
        if !progenies_of_step(trs, step, p)?.contains(q) {
            return Err(broken);
        }
        let rule = &trs.rules()[step.rule_index];
        match classify(&rule.lhs, &step.redex, p) {
            Case::Context if p.is_parallel(&step.redex) => {}
            Case::Context => {
                let rel = step.redex.strip_prefix(p).expect("redex below p");
                out.push(&combined, &rel, step.rule_index)?;
            }
            Case::Variable(..) | Case::Inner(_) => {}
            Case::Redex => {
                let q1 = q.strip_prefix(p).expect("progeny of the redex");
                let pair = dp
                    .origins
                    .iter()
                    .position(|o| o.0 == step.rule_index && o.1 == q1);
                match pair {
                    Some(ix) => {
                        out.push(&combined, &Position::root(), base_len + ix)?;
                        dpsize += 1;
                    }
                    // a constructor-rooted progeny of the redex; only
                    // possible before the end of the chain
                    None => return Err(ProgenyError::UndefinedRoot { pos: format!("{q:?}") }),
                }
            }
        }
        if *out.last() != sharp(*j, q)? {
            return Err(broken);
        }
    }
    out.validate(&combined)?;
    Ok(ImplicitDp {
        trs: combined,
        derivation: out,
        dpsize,
        base_len,
    })
}

/// Outcome of one named property over one derivation.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl PropertyCheck {
    pub fn new(name: &'static str) -> Self {
        PropertyCheck {
            name,
            checked: 0,
            violations: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs every progeny and progenitor-graph property on `d`.
pub fn check_progeny_properties(trs: &Trs, d: &Derivation) -> Result<Vec<PropertyCheck>, ProgenyError> {
    let a = Analysis::new(trs, d)?;
    let dp = dependency_pairs(trs);
    let n = a.len();
    let c = trs.branching_constant();

    let mut nonempty = PropertyCheck::new("progenitors_nonempty");
    for (k, step) in d.steps.iter().enumerate() {
        for q in step.target.positions() {
            nonempty.check(!a.map.parents[k][&q].is_empty(), || format!("step {}: {q:?}", k + 1));
            let all = a.map.progenitors(0, k + 1, &[q.clone()].into_iter().collect());
            nonempty.check(!all.is_empty(), || format!("t1 →* t{}: {q:?}", k + 2));
        }
    }

    let mut agree = PropertyCheck::new("descendants_agree");
    for step in &d.steps {
        let l = &trs.rules()[step.rule_index].lhs;
        for p in step.source.positions() {
            if matches!(classify(l, &step.redex, &p), Case::Context | Case::Variable(..)) {
                let desc = descendants_of_step(trs, step, &p)?;
                let prog = progenies_of_step(trs, step, &p)?;
                agree.check(desc == prog, || format!("{p:?} in {}", step.source));
            }
        }
    }

    let mut lifting = PropertyCheck::new("prefix_lifting");
    for (k, step) in d.steps.iter().enumerate() {
        let anc = &a.map.parents[k];
        for q in step.target.positions() {
            for q2 in step.target.positions().into_iter().filter(|q2| q.is_prefix_of(q2)) {
                for p0 in &anc[&q] {
                    let ok = anc[&q2].iter().any(|p1| p0.is_prefix_of(p1));
                    lifting.check(ok, || format!("step {}: {q:?} ≤ {q2:?}, p0 {p0:?}", k + 1));
                }
            }
        }
    }

    let mut unique = PropertyCheck::new("main_progenitor_unique");
    let mut constructor = PropertyCheck::new("non_defined_single_main_progeny");
    let mut hidden = PropertyCheck::new("hidden_r_steps_singleton");
    for j in 0..=n {
        for q in a.branches.branch(j) {
            for i in 0..j {
                let m = a.main_progenitors(i, j, q);
                unique.check(m.len() == 1, || format!("t{}@{q:?} in t{}: {m:?}", j + 1, i + 1));
                if m.len() != 1 {
                    continue;
                }
                let p = m.into_iter().next().expect("singleton");
                let quiet = (i..j).all(|k| a.main_progenitor(k, j, q).is_ok_and(|x| &x != a.redex(k)));
                if quiet {
                    let ch = a.main_progenies(i, j, &p);
                    hidden.check(ch.len() == 1 && ch.contains(q), || {
                        format!("t{}@{p:?} → t{}@{q:?}: {ch:?}", i + 1, j + 1)
                    });
                }
            }
        }
        for p in a.branches.branch(j) {
            if !a.is_defined_at(j, p) {
                for k in j..=n {
                    let ch = a.main_progenies(j, k, p);
                    constructor.check(ch.len() <= 1, || format!("t{}@{p:?} in t{}: {ch:?}", j + 1, k + 1));
                }
            }
        }
    }

    let g = a.progenitor_graph();
    let mut edge_derivs = PropertyCheck::new("edge_derivations");
    for (s, t) in &g.edges {
        let mut chain = Vec::new();
        for k in s.term..=t.term {
            chain.push((k, a.main_progenitor(k, t.term, &t.pos)?));
        }
        let res = implicit_dp_with(&dp, d, &chain);
        let ok = res.as_ref().is_ok_and(|r| {
            let m = r.derivation.len();
            r.dpsize == 1 && m >= 1 && r.is_dp_step(m - 1)
        });
        edge_derivs.check(ok, || format!("{s} → {t}: {res:?}"));
    }

    let mut coverage = PropertyCheck::new("coverage");
    let mut leaf = PropertyCheck::new("leaf_covering");
    let covers = |node: &Node, q: &Position| {
        a.main_progenies(node.term, n, &node.pos).contains(q)
            && g.successors(node).iter().all(|m| !a.main_progenies(m.term, n, &m.pos).contains(q))
    };
    for q in a.branches.branch(n) {
        let first = a.main_progenitors(0, n, q);
        let by_leaf = first.len() == 1 && first.iter().all(|p| !a.is_defined_at(0, p));
        let by_node = g.nodes.iter().any(|node| covers(node, q));
        coverage.check(by_leaf || by_node, || format!("{q:?}"));
    }
    for node in &g.nodes {
        let count = a.branches.branch(n).iter().filter(|q| covers(node, q)).count();
        leaf.check(count <= c, || format!("{node} covers {count} > {c}"));
    }

    let mut shape = PropertyCheck::new("graph_shape");
    shape.check(g.is_forest(), || "not a forest".into());
    shape.check(g.max_out_degree() <= c, || format!("out-degree {} > {c}", g.max_out_degree()));
    let roots: BTreeSet<&Node> = g.roots().into_iter().collect();
    let first: BTreeSet<&Node> = g.nodes.iter().filter(|x| x.term == 0).collect();
    shape.check(roots == first, || format!("roots {roots:?} vs t1 nodes {first:?}"));

    Ok(vec![
        nonempty,
        agree,
        lifting,
        unique,
        constructor,
        hidden,
        edge_derivs,
        coverage,
        leaf,
        shape,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_trace;
    use crate::term::{parse_trs, Position};

    fn pos(s: &str) -> Position {
        s.parse().unwrap()
    }

    fn set(ps: &[&str]) -> BTreeSet<Position> {
        ps.iter().map(|p| pos(p)).collect()
    }

    fn rb() -> Trs {
        parse_trs("(VAR x) (RULES f(x) -> g(c,x) g(x,x) -> h(x,x) c -> d)").unwrap()
    }

    fn rb_derivation() -> Derivation {
        parse_trace(&rb(), "f(f(c))\n@1 #1\nf(g(c,c))\n@1 #2\nf(h(c,c))\n@1.2 #3\nf(h(c,d))\n").unwrap()
    }

    #[test]
    fn rb_steps() {
        let d = rb_derivation();
        let s = &d.steps[0];
        assert_eq!(progenies_of_step(&rb(), s, &pos("1")).unwrap(), set(&["1", "1.1"]));
        assert_eq!(progenies_of_step(&rb(), s, &pos("1.1")).unwrap(), set(&["1.2"]));
        assert_eq!(progenies_of_step(&rb(), s, &pos("")).unwrap(), set(&[""]));
        assert_eq!(descendants_of_step(&rb(), s, &pos("1")).unwrap(), set(&[]));
        assert_eq!(progenies_of_derivation(&rb(), &d.slice(0, 2), &pos("1.1")).unwrap(), set(&["1.1", "1.2"]));
        assert_eq!(progenies_of_derivation(&rb(), &d, &pos("")).unwrap(), set(&[""]));
        assert!(progenies_of_step(&rb(), s, &pos("2")).is_err());
    }

    #[test]
    fn nonlinear_progenitors() {
        let r = parse_trs("(VAR x) (RULES f(x,x) -> g(x))").unwrap();
        let d = parse_trace(&r, "f(0,0)\n@ #1\ng(0)\n").unwrap();
        assert_eq!(progenitors_of_step(&r, &d.steps[0], &pos("1")).unwrap(), set(&["1", "2"]));
    }

    #[test]
    fn rb_main_branches() {
        let a = Analysis::new(&rb(), &rb_derivation()).unwrap();
        for i in 0..4 {
            assert_eq!(a.branches.branch(i), &[pos(""), pos("1"), pos("1.1")][..]);
        }
        assert_eq!(a.main_progenitors(0, 3, &pos("1.1")), set(&["1"]));
        assert!(a.map.progenitors(0, 3, &set(&["1.1"])).contains(&pos("1.1")));
        assert_eq!(a.main_progenies(0, 1, &pos("1.2")), set(&[]));
    }

    #[test]
    fn rb_progenitor_graph() {
        let g = progenitor_graph(&rb(), &rb_derivation()).unwrap();
        let nodes: Vec<String> = g.nodes.iter().map(|n| n.to_string()).collect();
        assert_eq!(nodes, ["t1@", "t1@1", "t1@1.1", "t2@1", "t2@1.1"]);
        let edges: Vec<String> = g.edges.iter().map(|(a, b)| format!("{a}>{b}")).collect();
        assert_eq!(edges, ["t1@1>t2@1", "t1@1>t2@1.1"]);
    }

    #[test]
    fn rb_implicit() {
        let d = rb_derivation();
        let r = implicit_dp_derivation(&rb(), &d, &[(0, pos("1")), (1, pos("1.1")), (2, pos("1.2"))]).unwrap();
        assert_eq!(r.dpsize, 1);
        assert_eq!(r.derivation.len(), 1);
        assert_eq!(r.derivation.initial.to_string(), "f#(c)");
        assert_eq!(r.derivation.last().to_string(), "c#");
        let root: Vec<_> = (0..4).map(|i| (i, pos(""))).collect();
        let r = implicit_dp_derivation(&rb(), &d, &root).unwrap();
        assert_eq!((r.dpsize, r.derivation.len()), (0, 3));
        assert_eq!(r.derivation.initial.to_string(), "f#(f(c))");
        let r = implicit_dp_derivation(&rb(), &d, &[(2, pos("1"))]);
        assert!(matches!(r, Err(ProgenyError::UndefinedRoot { .. })));
        let r = implicit_dp_derivation(&rb(), &d, &[(0, pos("1.1")), (1, pos("1.1"))]);
        assert!(matches!(r, Err(ProgenyError::ChainNotProgenyLinked { index: 1 })));
    }

    #[test]
    fn rb_properties() {
        for c in check_progeny_properties(&rb(), &rb_derivation()).unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }

    fn edges(g: &ProgenitorGraph) -> Vec<String> {
        g.edges.iter().map(|(a, b)| format!("{a}>{b}")).collect()
    }

    #[test]
    fn rd_full_binary_tree() {
        let rd = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))))").unwrap();
        let d = parse_trace(
            &rd,
            "f(s(s(0)))\n@ #1\ns(f(f(s(0))))\n@1.1 #1\ns(f(s(f(f(0)))))\n@1 #1\ns(s(f(f(f(f(0))))))\n",
        )
        .unwrap();
        let g = progenitor_graph(&rd, &d).unwrap();
        let nodes: Vec<String> = g.nodes.iter().map(|n| n.to_string()).collect();
        assert_eq!(nodes, ["t1@", "t2@1", "t2@1.1", "t3@1.1.1", "t3@1.1.1.1", "t4@1.1", "t4@1.1.1"]);
        assert_eq!(
            edges(&g),
            ["t1@>t2@1", "t1@>t2@1.1", "t2@1>t4@1.1", "t2@1>t4@1.1.1", "t2@1.1>t3@1.1.1", "t2@1.1>t3@1.1.1.1"]
        );
        assert_eq!(g.height(), 2);
        let b = main_branches(&rd, &d).unwrap();
        assert_eq!(b.branch(3).len(), 7);
        for c in check_progeny_properties(&rd, &d).unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn re_chain() {
        let re = parse_trs("(VAR x) (RULES d(s(x)) -> s(s(d(x))))").unwrap();
        let d = parse_trace(&re, "d(s(s(0)))\n@ #1\ns(s(d(s(0))))\n@1.1 #1\ns(s(s(s(d(0)))))\n").unwrap();
        let g = progenitor_graph(&re, &d).unwrap();
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(edges(&g), ["t1@>t2@1.1", "t2@1.1>t3@1.1.1.1"]);
        let json = g.to_json();
        assert_eq!(json["nodes"][1], serde_json::json!([2, "1.1"]));
        assert!(g.to_dot().contains("label=\"t3@1.1.1.1\""));
    }

    #[test]
    fn empty_derivation() {
        let t = crate::term::parse_term("f(h(c,d))", &[]).unwrap();
        let d = Derivation::empty(t);
        let b = main_branches(&rb(), &d).unwrap();
        assert_eq!(b.branch(0), &[pos(""), pos("1"), pos("1.1")][..]);
        let r = implicit_dp_derivation(&rb(), &Derivation::empty(crate::term::parse_term("f(c)", &[]).unwrap()), &[(0, pos(""))]).unwrap();
        assert_eq!((r.dpsize, r.derivation.len()), (0, 0));
    }

    #[test]
    fn random_properties() {
        use rand::SeedableRng;
        let rde = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))) f(x) -> c(x,x))").unwrap();
        let rde = Trs::with_symbols(rde.rules().to_vec(), [(crate::term::sym("0"), 0)]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trs in [rb(), rde] {
            for k in 0..20 {
                let t = crate::rewrite::random_ground_term(&trs, 1 + k % 8, &mut rng).unwrap();
                let d = crate::rewrite::random_derivation(&trs, &t, 8, &mut rng);
                for c in check_progeny_properties(&trs, &d).unwrap() {
                    assert!(c.passed(), "{d:?} {c:?}");
                }
            }
        }
    }
}
