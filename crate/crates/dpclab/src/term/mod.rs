//! First-order terms, positions, substitutions, rules and rewrite systems.

mod parse;
mod position;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse_rules, parse_term, parse_term_with, parse_trs};
pub use position::Position;

/// Interned-by-refcount symbol name. Cheap to clone, shareable across threads.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// Fresh constant added to constant-free signatures during ground enumeration.
pub const FRESH_CONSTANT: &str = "⋄";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("ill-formed rule `{rule}`: {reason}")]
    IllFormedRule { rule: String, reason: String },
    #[error("symbol `{symbol}` used with arities {first} and {second}")]
    ArityClash {
        symbol: String,
        first: usize,
        second: usize,
    },
    #[error("position {pos:?} out of range in {term}")]
    PositionOutOfRange { pos: String, term: String },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Sym),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(sym(f), args)
    }

    pub fn constant(c: &str) -> Term {
        Term::App(sym(c), Vec::new())
    }

    /// `f^n(t)` for a unary `f`.
    pub fn iterate(f: &str, n: usize, t: Term) -> Term {
        (0..n).fold(t, |acc, _| Term::app(f, vec![acc]))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Function symbol at the root; `None` for variables.
    pub fn root(&self) -> Option<&Sym> {
        match self {
            Term::App(f, _) => Some(f),
            Term::Var(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, a) => a,
            Term::Var(_) => &[],
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, a) => 1 + a.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// 0 for variables and constants.
    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, a) if !a.is_empty() => 1 + a.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, a) => a.iter().all(Term::is_ground),
        }
    }

    /// Variables in order of first (preorder) occurrence.
    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Sym>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::App(_, a) => a.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn var_occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(&**y == x),
            Term::App(_, a) => a.iter().map(|t| t.var_occurrences(x)).sum(),
        }
    }

    /// No variable occurs twice.
    pub fn is_linear(&self) -> bool {
        let vs = self.vars();
        vs.iter().all(|x| self.var_occurrences(x) == 1)
    }

    /// Every symbol occurring in the term (not variables).
    pub fn symbols(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::App(f, _) = t {
                out.insert(f.clone());
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for a in self.args() {
            a.visit(f);
        }
    }

    /// `Pos(t)` in lexicographic (= preorder) order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&Position::root(), &mut out);
        out
    }

    fn collect_positions(&self, here: &Position, out: &mut Vec<Position>) {
        out.push(here.clone());
        for (i, a) in self.args().iter().enumerate() {
            a.collect_positions(&here.child(i + 1), out);
        }
    }

    /// `FPos(t)`
    pub fn fun_positions(&self) -> Vec<Position> {
        self.positions()
            .into_iter()
            .filter(|p| !self.get(p).map_or(true, Term::is_var))
            .collect()
    }

    /// `VPos(t)`
    pub fn var_positions(&self) -> Vec<Position> {
        self.positions()
            .into_iter()
            .filter(|p| self.get(p).is_some_and(Term::is_var))
            .collect()
    }

    pub fn get(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in p.indices() {
            t = t.args().get(i - 1)?;
        }
        Some(t)
    }

    /// `t|p`
    pub fn subterm_at(&self, p: &Position) -> Result<&Term, TermError> {
        self.get(p).ok_or_else(|| TermError::PositionOutOfRange {
            pos: p.to_string(),
            term: self.to_string(),
        })
    }

    pub fn contains_position(&self, p: &Position) -> bool {
        self.get(p).is_some()
    }

    /// `t[u]_p`
    pub fn replace_at(&self, p: &Position, u: Term) -> Result<Term, TermError> {
        fn go(t: &Term, ix: &[usize], u: Term) -> Option<Term> {
            match ix.split_first() {
                None => Some(u),
                Some((&i, rest)) => match t {
                    Term::App(f, a) if i >= 1 && i <= a.len() => {
                        let mut a = a.clone();
                        a[i - 1] = go(&a[i - 1], rest, u)?;
                        Some(Term::App(f.clone(), a))
                    }
                    _ => None,
                },
            }
        }
        go(self, p.indices(), u).ok_or_else(|| TermError::PositionOutOfRange {
            pos: p.to_string(),
            term: self.to_string(),
        })
    }

    /// `u ⊴ t`
    pub fn has_subterm(&self, u: &Term) -> bool {
        self == u || self.args().iter().any(|a| a.has_subterm(u))
    }

    /// `u ◁ t`
    pub fn has_proper_subterm(&self, u: &Term) -> bool {
        self.args().iter().any(|a| a.has_subterm(u))
    }

    pub fn apply(&self, s: &Substitution) -> Term {
        match self {
            Term::Var(x) => s.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, a) => Term::App(f.clone(), a.iter().map(|t| t.apply(s)).collect()),
        }
    }

    /// Leaf positions, left to right.
    pub fn leaves(&self) -> Vec<Position> {
        self.positions()
            .into_iter()
            .filter(|p| self.get(p).is_some_and(|t| t.args().is_empty()))
            .collect()
    }

    /// Branches as prefix-closed chains from the root to a leaf, left to right.
    pub fn branches(&self) -> Vec<Vec<Position>> {
        self.leaves().iter().map(Position::prefixes).collect()
    }

    pub fn metrics(&self) -> TermMetrics {
        TermMetrics {
            size: self.size(),
            depth: self.depth(),
            branches: self.branches(),
        }
    }

    /// `t♯`: marks the root symbol; variables are left alone.
    pub fn marked(&self) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(f, a) => Term::App(mark(f), a.clone()),
        }
    }
}

/// `f` ↦ `f#`
pub fn mark(f: &str) -> Sym {
    sym(&format!("{f}#"))
}

pub fn is_marked(f: &str) -> bool {
    f.ends_with('#')
}

/// Strips a trailing mark, if any.
pub fn unmark(f: &str) -> &str {
    f.strip_suffix('#').unwrap_or(f)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TermMetrics {
    pub size: usize,
    pub depth: usize,
    pub branches: Vec<Vec<Position>>,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::App(g, a) => {
                f.write_str(g)?;
                if !a.is_empty() {
                    f.write_str("(")?;
                    for (i, t) in a.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{t}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Sym, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: Sym, t: Term) -> Option<Term> {
        self.0.insert(x, t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Union of two substitutions over disjoint domains; `None` on a conflicting binding.
    pub fn merge(&self, other: &Substitution) -> Option<Substitution> {
        let mut out = self.clone();
        for (x, t) in other.iter() {
            match out.0.get(x) {
                Some(u) if u != t => return None,
                _ => {
                    out.0.insert(x.clone(), t.clone());
                }
            }
        }
        Some(out)
    }
}

impl FromIterator<(Sym, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Sym, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}↦{t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl serde::Serialize for Substitution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (x, t) in &self.0 {
            m.serialize_entry(&**x, &t.to_string())?;
        }
        m.end()
    }
}

/// Syntactic matching: the unique `σ` with `pattern·σ = subject`, if any.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    match_into(pattern, subject, &mut s).then_some(s)
}

pub(crate) fn match_into(pattern: &Term, subject: &Term, s: &mut Substitution) -> bool {
    match (pattern, subject) {
        (Term::Var(x), _) => match s.0.get(x) {
            Some(t) => t == subject,
            None => {
                s.0.insert(x.clone(), subject.clone());
                true
            }
        },
        (Term::App(f, a), Term::App(g, b)) => {
            f == g && a.len() == b.len() && a.iter().zip(b).all(|(p, t)| match_into(p, t, s))
        }
        (Term::App(..), Term::Var(_)) => false,
    }
}

/// Most general unifier (Robinson, with occurs check).
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    let mut sub = Substitution::new();
    let mut stack = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = a.apply(&sub);
        let b = b.apply(&sub);
        match (&a, &b) {
            _ if a == b => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.vars().contains(x) {
                    return None;
                }
                let single: Substitution = [(x.clone(), other.clone())].into_iter().collect();
                for v in sub.0.values_mut() {
                    *v = v.apply(&single);
                }
                sub.0.insert(x.clone(), other.clone());
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
        }
    }
    Some(sub)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    /// Checks `l ∉ V` and `Var(r) ⊆ Var(l)`.
    pub fn new(lhs: Term, rhs: Term) -> Result<Rule, TermError> {
        let rule = Rule { lhs, rhs };
        if rule.lhs.is_var() {
            return Err(TermError::IllFormedRule {
                rule: rule.to_string(),
                reason: "left-hand side is a variable".into(),
            });
        }
        let lv = rule.lhs.vars();
        if let Some(x) = rule.rhs.vars().into_iter().find(|x| !lv.contains(x)) {
            return Err(TermError::IllFormedRule {
                rule: rule.to_string(),
                reason: format!("variable {x} occurs only on the right"),
            });
        }
        Ok(rule)
    }

    pub fn root(&self) -> &Sym {
        self.lhs.root().expect("rule lhs is never a variable")
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    /// Variables of the left-hand side that do not occur on the right.
    pub fn erased_vars(&self) -> Vec<Sym> {
        let rv = self.rhs.vars();
        self.lhs.vars().into_iter().filter(|x| !rv.contains(x)).collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl serde::Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An ordered rule list together with its inferred signature.
#[derive(Clone, PartialEq, Eq)]
pub struct Trs {
    rules: Vec<Rule>,
    signature: BTreeMap<Sym, usize>,
    defined: BTreeSet<Sym>,
}

impl Trs {
    pub fn new(rules: Vec<Rule>) -> Result<Trs, TermError> {
        Trs::with_symbols(rules, std::iter::empty())
    }

    /// Like [`Trs::new`] but also registers symbols that occur in no rule.
    pub fn with_symbols(
        rules: Vec<Rule>,
        extra: impl IntoIterator<Item = (Sym, usize)>,
    ) -> Result<Trs, TermError> {
        let mut signature = BTreeMap::new();
        for (f, n) in extra {
            add_arity(&mut signature, &f, n)?;
        }
        for r in &rules {
            collect_arities(&r.lhs, &mut signature)?;
            collect_arities(&r.rhs, &mut signature)?;
        }
        let defined = rules.iter().map(|r| r.root().clone()).collect();
        Ok(Trs {
            rules,
            signature,
            defined,
        })
    }

    pub fn empty() -> Trs {
        Trs::new(Vec::new()).expect("empty system is well formed")
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, i: usize) -> Option<&Rule> {
        self.rules.get(i)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn signature(&self) -> &BTreeMap<Sym, usize> {
        &self.signature
    }

    pub fn arity(&self, f: &str) -> Option<usize> {
        self.signature.get(f).copied()
    }

    pub fn defined(&self) -> &BTreeSet<Sym> {
        &self.defined
    }

    pub fn is_defined(&self, f: &str) -> bool {
        self.defined.contains(f)
    }

    pub fn constructors(&self) -> BTreeSet<Sym> {
        self.signature
            .keys()
            .filter(|f| !self.defined.contains(*f))
            .cloned()
            .collect()
    }

    /// All arities ≤ 1.
    pub fn is_srs(&self) -> bool {
        self.signature.values().all(|&n| n <= 1)
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_left_linear)
    }

    pub fn max_arity(&self) -> usize {
        self.signature.values().copied().max().unwrap_or(0)
    }

    /// `C = max({2} ∪ {depth(r) | l → r ∈ R})`
    pub fn branching_constant(&self) -> usize {
        self.rules.iter().map(|r| r.rhs.depth()).fold(2, usize::max)
    }

    /// Checks that `t` uses every symbol with the arity recorded here.
    pub fn check_term(&self, t: &Term) -> Result<(), TermError> {
        let mut sig = self.signature.clone();
        collect_arities(t, &mut sig)
    }

    /// Concatenates the rules of two systems.
    pub fn union(&self, other: &Trs) -> Result<Trs, TermError> {
        let rules = self.rules.iter().chain(other.rules.iter()).cloned().collect();
        let extra = self
            .signature
            .iter()
            .chain(other.signature.iter())
            .map(|(f, n)| (f.clone(), *n));
        Trs::with_symbols(rules, extra)
    }

    /// Variables occurring in the rules, sorted.
    pub fn variables(&self) -> BTreeSet<Sym> {
        self.rules
            .iter()
            .flat_map(|r| r.lhs.vars().into_iter().chain(r.rhs.vars()))
            .collect()
    }

    /// Renders the system in the TRS text format accepted by [`parse_trs`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let vars = self.variables();
        if !vars.is_empty() {
            s.push_str("(VAR");
            for v in &vars {
                s.push(' ');
                s.push_str(v);
            }
            s.push_str(")\n");
        }
        s.push_str("(RULES\n");
        for r in &self.rules {
            s.push_str("  ");
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s.push_str(")\n");
        s
    }
}

impl fmt::Debug for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.rules).finish()
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn add_arity(sig: &mut BTreeMap<Sym, usize>, f: &Sym, n: usize) -> Result<(), TermError> {
    match sig.get(f) {
        Some(&m) if m != n => Err(TermError::ArityClash {
            symbol: f.to_string(),
            first: m,
            second: n,
        }),
        Some(_) => Ok(()),
        None => {
            sig.insert(f.clone(), n);
            Ok(())
        }
    }
}

fn collect_arities(t: &Term, sig: &mut BTreeMap<Sym, usize>) -> Result<(), TermError> {
    if let Term::App(f, a) = t {
        add_arity(sig, f, a.len())?;
        for u in a {
            collect_arities(u, sig)?;
        }
    }
    Ok(())
}

/// Ground terms of exactly `size` symbols, in a deterministic order.
///
/// A fresh constant `⋄` is added when the signature has none.
pub fn ground_terms_of_size(signature: &BTreeMap<Sym, usize>, size: usize) -> Vec<Term> {
    GroundEnumerator::new(signature).of_size(size)
}

/// Ground terms of size `1..=max_size`, smallest first.
pub fn ground_terms_up_to(signature: &BTreeMap<Sym, usize>, max_size: usize) -> Vec<Term> {
    let mut e = GroundEnumerator::new(signature);
    (1..=max_size).flat_map(|n| e.of_size(n)).collect()
}

pub struct GroundEnumerator {
    symbols: Vec<(Sym, usize)>,
    memo: Vec<Option<Vec<Term>>>,
}

impl GroundEnumerator {
    pub fn new(signature: &BTreeMap<Sym, usize>) -> Self {
        let mut symbols: Vec<(Sym, usize)> =
            signature.iter().map(|(f, n)| (f.clone(), *n)).collect();
        if !symbols.iter().any(|(_, n)| *n == 0) {
            symbols.push((sym(FRESH_CONSTANT), 0));
        }
        GroundEnumerator {
            symbols,
            memo: Vec::new(),
        }
    }

    pub fn of_size(&mut self, size: usize) -> Vec<Term> {
        if size == 0 {
            return Vec::new();
        }
        if self.memo.len() <= size {
            self.memo.resize(size + 1, None);
        }
        if let Some(v) = &self.memo[size] {
            return v.clone();
        }
        let mut out = Vec::new();
        for (f, n) in self.symbols.clone() {
            if n == 0 {
                if size == 1 {
                    out.push(Term::App(f.clone(), Vec::new()));
                }
                continue;
            }
            if size < n + 1 {
                continue;
            }
            for split in compositions(size - 1, n) {
                let pools: Vec<Vec<Term>> = split.iter().map(|&k| self.of_size(k)).collect();
                cartesian(&pools, &mut |args| out.push(Term::App(f.clone(), args.to_vec())));
            }
        }
        self.memo[size] = Some(out.clone());
        out
    }
}

/// Ordered ways to write `total` as a sum of `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn cartesian<T: Clone>(pools: &[Vec<T>], f: &mut impl FnMut(&[T])) {
    fn go<T: Clone>(pools: &[Vec<T>], acc: &mut Vec<T>, f: &mut impl FnMut(&[T])) {
        match pools.split_first() {
            None => f(acc),
            Some((first, rest)) => {
                for x in first {
                    acc.push(x.clone());
                    go(rest, acc, f);
                    acc.pop();
                }
            }
        }
    }
    go(pools, &mut Vec::new(), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s, &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn metrics() {
        let m = t("f(s(0))").metrics();
        assert_eq!((m.size, m.depth), (3, 2));
        assert_eq!((t("c").size(), t("c").depth()), (1, 0));
        assert_eq!(t("x").depth(), 0);
        let b = t("f(h(c,d))").branches();
        let want: Vec<Vec<Position>> = ["1.1", "1.2"]
            .iter()
            .map(|s| s.parse::<Position>().unwrap().prefixes())
            .collect();
        assert_eq!(b, want);
        assert_eq!(b[0].len(), 3);
    }

    #[test]
    fn matching() {
        let s = match_term(&t("f(s(x))"), &t("f(s(0))")).unwrap();
        assert_eq!(s.get("x"), Some(&t("0")));
        assert!(match_term(&t("f(x,x)"), &t("f(0,s(0))")).is_none());
        assert!(match_term(&t("f(x,x)"), &t("f(0,0)")).is_some());
        assert!(match_term(&t("s(x)"), &t("y")).is_none());
    }

    #[test]
    fn replace_and_subterm() {
        let p: Position = "1.1".parse().unwrap();
        assert_eq!(t("f(f(c))").replace_at(&p, t("d")).unwrap(), t("f(f(d))"));
        let bad: Position = "2".parse().unwrap();
        assert!(matches!(
            t("f(c)").subterm_at(&bad),
            Err(TermError::PositionOutOfRange { .. })
        ));
        assert!(t("f(c)").replace_at(&bad, t("d")).is_err());
    }

    #[test]
    fn unification() {
        let s = unify(&t("f(x,s(y))"), &t("f(s(z),x)")).unwrap();
        assert_eq!(t("f(x,s(y))").apply(&s), t("f(s(z),x)").apply(&s));
        assert!(unify(&t("f(x)"), &t("f(s(x))")).is_none());
        assert!(unify(&t("f(x)"), &t("g(x)")).is_none());
    }

    #[test]
    fn branching_constant() {
        let rde = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))) f(x) -> c(x,x))").unwrap();
        assert_eq!(rde.branching_constant(), 3);
        assert_eq!(Trs::empty().branching_constant(), 2);
    }

    #[test]
    fn enumeration_counts() {
        // sizes of ground terms over {0/0, s/1}: exactly one per size
        let sig: BTreeMap<Sym, usize> = [(sym("0"), 0), (sym("s"), 1)].into_iter().collect();
        for n in 1..6 {
            assert_eq!(ground_terms_of_size(&sig, n).len(), 1);
        }
        // binary trees over {c/0, g/2}: Catalan numbers at odd sizes
        let sig: BTreeMap<Sym, usize> = [(sym("c"), 0), (sym("g"), 2)].into_iter().collect();
        let counts: Vec<usize> = (1..=9).map(|n| ground_terms_of_size(&sig, n).len()).collect();
        assert_eq!(counts, vec![1, 0, 1, 0, 2, 0, 5, 0, 14]);
        let sig: BTreeMap<Sym, usize> = [(sym("s"), 1)].into_iter().collect();
        assert_eq!(ground_terms_of_size(&sig, 2), vec![t("s(⋄)")]);
    }
}
