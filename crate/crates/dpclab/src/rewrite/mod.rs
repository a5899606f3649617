//! Single steps, recorded derivations, strategies and derivation heights.

mod complexity;
mod height;
mod trace;

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::term::{match_term, Position, Substitution, Term, TermError, Trs};


pub use height::{
    derivation_height, derivation_height_graph, potential_depth, potential_size,
    relative_derivation_height, relative_height_graph, HeightCache, RelativeCache,
    DEFAULT_BUDGET,
};
pub use complexity::{empirical_complexity, ComplexityMode, ComplexityRow};
pub use trace::{parse_trace, write_trace};
pub(crate) use height::on_big_stack;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("non-terminating: reachable cycle through {term}")]
    NonTerminating { term: String },
    #[error("relative non-termination: a strict step lies on a cycle through {term}")]
    NonTerminatingRelative { term: String },
    #[error("budget of {budget} explored terms exceeded")]
    BudgetExceeded { budget: usize },
    #[error("step {index} is not a valid rewrite step: {reason}")]
    InvalidStep { index: usize, reason: String },
    #[error("trace line {line}: {msg}")]
    Trace { line: usize, msg: String },
    #[error(transparent)]
    Term(#[from] TermError),
}

/// `source →_{redex, rule} target` together with the matching substitution.
#[derive(Clone, PartialEq, Eq, serde::Serialize)]
pub struct RewriteStep {
    pub source: Term,
    pub redex: Position,
    pub rule_index: usize,
    pub subst: Substitution,
    pub target: Term,
}

impl RewriteStep {
    /// Recomputes the target from source, redex, rule and substitution.
    pub fn validate(&self, trs: &Trs) -> Result<(), String> {
        let rule = trs
            .rule(self.rule_index)
            .ok_or_else(|| format!("no rule with index {}", self.rule_index))?;
        let at = self
            .source
            .subterm_at(&self.redex)
            .map_err(|e| e.to_string())?;
        if rule.lhs.apply(&self.subst) != *at {
            return Err(format!("{} does not match {} at {:?}", rule.lhs, at, self.redex));
        }
        let target = self
            .source
            .replace_at(&self.redex, rule.rhs.apply(&self.subst))
            .map_err(|e| e.to_string())?;
        if target != self.target {
            return Err(format!("expected target {target}, recorded {}", self.target));
        }
        Ok(())
    }
}

impl fmt::Debug for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} →[{:?}, #{}] {}",
            self.source,
            self.redex,
            self.rule_index + 1,
            self.target
        )
    }
}

/// Applies rule `rule_index` at `redex`, if it matches there.
pub fn rewrite_at(
    trs: &Trs,
    t: &Term,
    redex: &Position,
    rule_index: usize,
) -> Result<RewriteStep, RewriteError> {
    let invalid = |reason: String| RewriteError::InvalidStep {
        index: 0,
        reason,
    };
    let rule = trs
        .rule(rule_index)
        .ok_or_else(|| invalid(format!("no rule with index {rule_index}")))?;
    let at = t.subterm_at(redex)?;
    let subst = match_term(&rule.lhs, at)
        .ok_or_else(|| invalid(format!("rule {rule} does not match {at} at {redex:?}")))?;
    let target = t.replace_at(redex, rule.rhs.apply(&subst))?;
    Ok(RewriteStep {
        source: t.clone(),
        redex: redex.clone(),
        rule_index,
        subst,
        target,
    })
}

/// Redexes of `t` as `(position, rule index, σ)`, ordered by position, then rule.
pub fn redexes(trs: &Trs, t: &Term) -> Vec<(Position, usize, Substitution)> {
    let mut out = Vec::new();
    for p in t.positions() {
        let u = t.get(&p).expect("own position");
        if u.is_var() || !u.root().is_some_and(|f| trs.is_defined(f)) {
            continue;
        }
        for (i, r) in trs.rules().iter().enumerate() {
            if let Some(s) = match_term(&r.lhs, u) {
                out.push((p.clone(), i, s));
            }
        }
    }
    out
}

/// All one-step reducts in (position-lex, rule-order) order.
pub fn one_step_reducts(trs: &Trs, t: &Term) -> Vec<RewriteStep> {
    redexes(trs, t)
        .into_iter()
        .map(|(p, i, s)| {
            let target = t
                .replace_at(&p, trs.rules()[i].rhs.apply(&s))
                .expect("redex position exists");
            RewriteStep {
                source: t.clone(),
                redex: p,
                rule_index: i,
                subst: s,
                target,
            }
        })
        .collect()
}

pub fn is_normal_form(trs: &Trs, t: &Term) -> bool {
    redexes(trs, t).is_empty()
}

/// `initial → … ` as an ordered list of steps.
#[derive(Clone, PartialEq, Eq, serde::Serialize)]
pub struct Derivation {
    pub initial: Term,
    pub steps: Vec<RewriteStep>,
}

impl Derivation {
    pub fn empty(initial: Term) -> Self {
        Derivation {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `t_1, …, t_n` (n = len + 1).
    pub fn terms(&self) -> Vec<&Term> {
        std::iter::once(&self.initial)
            .chain(self.steps.iter().map(|s| &s.target))
            .collect()
    }

    /// 0-based access to `t_{i+1}`.
    pub fn term(&self, i: usize) -> &Term {
        if i == 0 {
            &self.initial
        } else {
            &self.steps[i - 1].target
        }
    }

    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.initial, |s| &s.target)
    }

    /// Appends `rule_index` at `redex` applied to the current last term.
    pub fn push(&mut self, trs: &Trs, redex: &Position, rule_index: usize) -> Result<(), RewriteError> {
        let step = rewrite_at(trs, self.last(), redex, rule_index).map_err(|e| match e {
            RewriteError::InvalidStep { reason, .. } => RewriteError::InvalidStep {
                index: self.steps.len(),
                reason,
            },
            other => other,
        })?;
        self.steps.push(step);
        Ok(())
    }

    /// Appends all steps of `other`, which must start at the current last term.
    pub fn extend(&mut self, other: Derivation) -> Result<(), RewriteError> {
        if other.initial != *self.last() {
            return Err(RewriteError::InvalidStep {
                index: self.steps.len(),
                reason: format!("cannot append a derivation from {} to one ending in {}", other.initial, self.last()),
            });
        }
        self.steps.extend(other.steps);
        Ok(())
    }

    /// The sub-derivation `t_{from+1} → … → t_{to+1}` (0-based term indices).
    pub fn slice(&self, from: usize, to: usize) -> Derivation {
        Derivation {
            initial: self.term(from).clone(),
            steps: self.steps[from..to].to_vec(),
        }
    }

    /// Checks chaining and revalidates every step against `trs`.
    pub fn validate(&self, trs: &Trs) -> Result<(), RewriteError> {
        let mut cur = &self.initial;
        for (i, s) in self.steps.iter().enumerate() {
            if &s.source != cur {
                return Err(RewriteError::InvalidStep {
                    index: i,
                    reason: format!("source {} does not continue from {}", s.source, cur),
                });
            }
            s.validate(trs)
                .map_err(|reason| RewriteError::InvalidStep { index: i, reason })?;
            cur = &s.target;
        }
        Ok(())
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.initial)?;
        for s in &self.steps {
            write!(f, " →[{:?}] {}", s.redex, s.target)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostInnermost,
    LeftmostOutermost,
}

/// Position and rule the strategy selects, or `None` for a normal form.
pub fn select_redex(trs: &Trs, t: &Term, strategy: Strategy) -> Option<(Position, usize)> {
    let rs = redexes(trs, t);
    let chosen = match strategy {
        // preorder: the first redex has no redex above it
        Strategy::LeftmostOutermost => rs.first().map(|r| r.0.clone()),
        Strategy::LeftmostInnermost => rs
            .iter()
            .map(|r| &r.0)
            .find(|p| !rs.iter().any(|q| p.is_proper_prefix_of(&q.0)))
            .cloned(),
    }?;
    let rule = rs.iter().find(|r| r.0 == chosen).map(|r| r.1)?;
    Some((chosen, rule))
}

/// Follows `strategy` for at most `max_steps` steps.
pub fn derive(trs: &Trs, t: &Term, strategy: Strategy, max_steps: usize) -> Derivation {
    let mut d = Derivation::empty(t.clone());
    while d.len() < max_steps {
        let Some((p, i)) = select_redex(trs, d.last(), strategy) else {
            break;
        };
        d.push(trs, &p, i).expect("selected redex applies");
    }
    d
}

/// Picks a uniformly random one-step reduct at each step.
pub fn random_derivation(trs: &Trs, t: &Term, max_steps: usize, rng: &mut impl Rng) -> Derivation {
    let mut d = Derivation::empty(t.clone());
    while d.len() < max_steps {
        let mut next = one_step_reducts(trs, d.last());
        if next.is_empty() {
            break;
        }
        let k = rng.gen_range(0..next.len());
        d.steps.push(next.swap_remove(k));
    }
    d
}

/// A random ground term of exactly `size` symbols over the signature of
/// `trs`, uniform among all such terms; `None` if there are none.
pub fn random_ground_term(trs: &Trs, size: usize, rng: &mut impl Rng) -> Option<Term> {
    let mut sig: Vec<(crate::term::Sym, usize)> =
        trs.signature().iter().map(|(f, n)| (f.clone(), *n)).collect();
    if !sig.iter().any(|(_, n)| *n == 0) {
        sig.push((crate::term::sym(crate::term::FRESH_CONSTANT), 0));
    }
    let counts = term_counts(&sig, size);
    if counts[size] == 0 {
        return None;
    }
    Some(sample_term(&sig, &counts, size, rng))
}

/// `counts[n]` = number of ground terms of size n (saturating).
fn term_counts(sig: &[(crate::term::Sym, usize)], max: usize) -> Vec<u128> {
    let mut c = vec![0u128; max + 1];
    for n in 1..=max {
        let mut total = 0u128;
        for (_, k) in sig {
            total = total.saturating_add(seq_count(&c, *k, n - 1));
        }
        c[n] = total;
    }
    c
}

/// Number of argument tuples of length `k` with total size `n`.
fn seq_count(c: &[u128], k: usize, n: usize) -> u128 {
    if k == 0 {
        return u128::from(n == 0);
    }
    let mut total = 0u128;
    for first in 1..=n {
        if c[first] == 0 {
            continue;
        }
        let rest = seq_count(c, k - 1, n - first);
        total = total.saturating_add(c[first].saturating_mul(rest));
    }
    total
}

fn sample_term(sig: &[(crate::term::Sym, usize)], c: &[u128], n: usize, rng: &mut impl Rng) -> Term {
    let weights: Vec<u128> = sig.iter().map(|(_, k)| seq_count(c, *k, n - 1)).collect();
    let total: u128 = weights.iter().sum();
    let mut pick = rng.gen_range(0..total);
    let mut chosen = 0;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            chosen = i;
            break;
        }
        pick -= w;
    }
    let (f, k) = &sig[chosen];
    let args = sample_args(sig, c, *k, n - 1, rng);
    Term::App(f.clone(), args)
}

fn sample_args(sig: &[(crate::term::Sym, usize)], c: &[u128], k: usize, n: usize, rng: &mut impl Rng) -> Vec<Term> {
    if k == 0 {
        return Vec::new();
    }
    let weights: Vec<u128> = (1..=n)
        .map(|first| c[first].saturating_mul(seq_count(c, k - 1, n - first)))
        .collect();
    let total: u128 = weights.iter().sum();
    let mut pick = rng.gen_range(0..total);
    let mut first = 1;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            first = i + 1;
            break;
        }
        pick -= w;
    }
    let mut out = vec![sample_term(sig, c, first, rng)];
    out.extend(sample_args(sig, c, k - 1, n - first, rng));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, parse_trs};
    use rand::SeedableRng;

    fn rb() -> Trs {
        parse_trs("(VAR x) (RULES f(x) -> g(c,x) g(x,x) -> h(x,x) c -> d)").unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &[]).unwrap()
    }

    #[test]
    fn reducts_in_order() {
        let rb = rb();
        let r = one_step_reducts(&rb, &t("f(f(c))"));
        let got: Vec<(String, Term)> = r.iter().map(|s| (s.redex.to_string(), s.target.clone())).collect();
        let want = vec![
            ("".to_string(), t("g(c,f(c))")),
            ("1".to_string(), t("f(g(c,c))")),
            ("1.1".to_string(), t("f(f(d))")),
        ];
        assert_eq!(got, want);
        for s in &r {
            s.validate(&rb).unwrap();
        }
        // several rules at one position come out in rule order
        let two = parse_trs("(VAR x) (RULES f(x) -> a f(c) -> b)").unwrap();
        let r = one_step_reducts(&two, &t("f(c)"));
        assert_eq!(r.iter().map(|s| s.rule_index).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn normal_form_has_no_reducts() {
        let rde = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))) f(x) -> c(x,x))").unwrap();
        assert!(one_step_reducts(&rde, &t("s(0)")).is_empty());
        let nonll = parse_trs("(VAR x) (RULES f(x,x) -> g(x))").unwrap();
        let r = one_step_reducts(&nonll, &t("f(0,0)"));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].target, t("g(0)"));
    }

    #[test]
    fn strategies() {
        let rb = rb();
        let li = derive(&rb, &t("f(g(c,c))"), Strategy::LeftmostInnermost, 10);
        li.validate(&rb).unwrap();
        assert_eq!(li.steps[0].redex.to_string(), "1.1");
        let lo = derive(&rb, &t("f(g(c,c))"), Strategy::LeftmostOutermost, 1);
        assert_eq!(lo.steps[0].redex, Position::root());
        assert_eq!(lo.last(), &t("g(c,g(c,c))"));
    }

    #[test]
    fn invalid_steps_rejected() {
        let rb = rb();
        let mut d = Derivation::empty(t("f(c)"));
        assert!(d.push(&rb, &"1".parse().unwrap(), 0).is_err());
        d.push(&rb, &"1".parse().unwrap(), 2).unwrap();
        assert_eq!(d.last(), &t("f(d)"));
        let mut bad = d.clone();
        bad.steps[0].target = t("f(c)");
        assert!(bad.validate(&rb).is_err());
    }

    #[test]
    fn random_terms_have_requested_size() {
        let rb = rb();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=10 {
            if let Some(u) = random_ground_term(&rb, n, &mut rng) {
                assert_eq!(u.size(), n);
            }
        }
        let d = random_derivation(&rb, &t("f(f(c))"), 12, &mut rng);
        d.validate(&rb).unwrap();
    }

    #[test]
    fn term_counts_match_enumeration() {
        let rb = rb();
        let sig: Vec<_> = rb.signature().iter().map(|(f, n)| (f.clone(), *n)).collect();
        let c = term_counts(&sig, 8);
        for n in 1..=8 {
            let e = crate::term::ground_terms_of_size(rb.signature(), n).len() as u128;
            assert_eq!(c[n], e);
        }
    }
}
