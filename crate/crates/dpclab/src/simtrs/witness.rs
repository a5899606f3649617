//! Constructive replay of the simulation proofs as validated derivations
//! over the generated system.

use std::collections::{HashSet, VecDeque};

use super::{
    g_index, numeral_value, tr_encode_with, SccHeight, SccHeights, SimError, SimParams, SimSystem, FILL, SEED,
    SIZE, START,
};
use crate::dp::DependencyGraph;
use crate::rewrite::{derive, one_step_reducts, Derivation, HeightCache, RewriteError, Strategy};
use crate::term::{Position, Term, Trs};

/// Everything needed to build witnesses for one source system.
pub struct SimContext {
    pub heights: SccHeights,
    pub system: SimSystem,
    budget: usize,
}

impl SimContext {
    pub fn new(trs: &Trs, params: SimParams, budget: usize) -> Result<Self, SimError> {
        Ok(SimContext {
            heights: SccHeights::new(trs, budget),
            system: SimSystem::new(params)?,
            budget,
        })
    }

    pub fn with_graph(trs: &Trs, dg: &DependencyGraph, params: SimParams, budget: usize) -> Result<Self, SimError> {
        Ok(SimContext {
            heights: SccHeights::with_graph(trs, dg, budget),
            system: SimSystem::new(params)?,
            budget,
        })
    }

    pub fn sim_trs(&self) -> &Trs {
        &self.system.trs
    }

    pub fn tr(&mut self, t: &Term) -> Result<Term, SimError> {
        tr_encode_with(&mut self.heights, self.system.params.a, t)
    }

    fn builder(&self, start: Term, step: usize) -> Builder<'_> {
        Builder {
            sys: &self.system,
            d: Derivation::empty(start),
            step,
            budget: self.budget,
        }
    }

    /// Witness `tr(s) →⁺ tr(t)` for the single step `s → t`.
    pub fn simulate_step(&mut self, step_index: usize, step: &crate::rewrite::RewriteStep) -> Result<Derivation, SimError> {
        let fail = |reason: String| SimError::SimulationFailed { step: step_index, reason };
        if !step.source.is_ground() {
            return Err(SimError::NotGround(step.source.to_string()));
        }
        let src_trs = self.heights.trs().clone();
        let rule = src_trs
            .rule(step.rule_index)
            .ok_or_else(|| fail(format!("no rule {}", step.rule_index)))?
            .clone();
        let p = &step.redex;
        let lsig = step.source.get(p).ok_or_else(|| fail("redex position missing".into()))?.clone();
        let start = self.tr(&step.source)?;
        let goal = self.tr(&step.target)?;
        let at = tr_position(p);
        let c = self.system.params.c;

        // local part: tr(lσ) →⁺ tr(rσ)
        let head = self.heights.get(&lsig)?;
        if head.height == 0 {
            return Err(fail(format!("sccheight({lsig}) = {head} at a redex")));
        }
        if rule.rhs.depth() > c {
            return Err(fail(format!("rhs depth {} exceeds C = {c}", rule.rhs.depth())));
        }
        let plan = plan_one(&mut self.heights, &rule.rhs, &rule.rhs.apply(&step.subst), &lsig)?;
        // congruence: the heads of all ancestors, innermost first
        let mut repairs = Vec::new();
        let mut anc = p.parent();
        while let Some(q) = anc {
            let before = self.heights.get(step.source.get(&q).expect("ancestor"))?;
            let after = self.heights.get(step.target.get(&q).expect("ancestor"))?;
            repairs.push((tr_position(&q), before, after));
            anc = q.parent();
        }
        let mut b = self.builder(start, step_index);
        b.apply(&at, b.sys.rule1(head.rank))?;
        b.run_one(&at, c, head, &plan)?;
        for (q, before, after) in &repairs {
            b.fix_head(q, *before, *after)?;
        }
        let d = b.finish()?;
        if d.last() != &goal {
            return Err(fail(format!("witness ends in {} instead of {goal}", d.last())));
        }
        Ok(d)
    }

    /// Witness `g^depth(t)(z) →* tr(t)`.
    pub fn seed(&mut self, t: &Term) -> Result<Derivation, SimError> {
        if !t.is_ground() {
            return Err(SimError::NotGround(t.to_string()));
        }
        let goal = self.tr(t)?;
        let start = Term::iterate(SEED, t.depth(), Term::constant(START));
        let plan = seed_plan(&mut self.heights, t)?;
        let mut b = self.builder(start, 0);
        b.seed(&Position::root(), t.depth(), &plan)?;
        let d = b.finish()?;
        if d.last() != &goal {
            return Err(SimError::SimulationFailed {
                step: 0,
                reason: format!("seed ends in {} instead of {goal}", d.last()),
            });
        }
        Ok(d)
    }
}

/// Position in `tr(t)` of the subterm at `p` in `t`.
fn tr_position(p: &Position) -> Position {
    Position::from_indices(p.indices().iter().map(|i| i + 1).collect::<Vec<_>>())
}

/// How to produce `tr(uσ)` from an `M`-tower during the local phase.
enum Plan {
    /// `uσ` occurs at this non-root position of `lσ`
    Descend(Position),
    /// rebuild the children and then repair the head
    Build {
        depth: usize,
        children: Vec<Plan>,
        target: SccHeight,
    },
}

fn plan_one(h: &mut SccHeights, u: &Term, usig: &Term, lsig: &Term) -> Result<Plan, SimError> {
    if let Some(q) = lsig
        .positions()
        .into_iter()
        .find(|q| !q.is_root() && lsig.get(q) == Some(usig))
    {
        return Ok(Plan::Descend(q));
    }
    if u.is_var() {
        return Err(SimError::SimulationFailed {
            step: 0,
            reason: format!("variable {u} does not occur below the redex"),
        });
    }
    let mut children = Vec::new();
    for (ui, si) in u.args().iter().zip(usig.args()) {
        children.push(plan_one(h, ui, si, lsig)?);
    }
    Ok(Plan::Build {
        depth: u.depth(),
        children,
        target: h.get(usig)?,
    })
}

/// For seeding: `(sccheight(t), plans of the arguments)`.
struct SeedPlan {
    target: SccHeight,
    depth: usize,
    children: Vec<SeedPlan>,
}

fn seed_plan(h: &mut SccHeights, t: &Term) -> Result<SeedPlan, SimError> {
    Ok(SeedPlan {
        target: h.get(t)?,
        depth: t.depth(),
        children: t.args().iter().map(|u| seed_plan(h, u)).collect::<Result<_, _>>()?,
    })
}

struct Builder<'a> {
    sys: &'a SimSystem,
    d: Derivation,
    step: usize,
    budget: usize,
}

impl Builder<'_> {
    fn fail(&self, reason: String) -> SimError {
        SimError::SimulationFailed { step: self.step, reason }
    }

    fn at(&self, pos: &Position) -> Result<&Term, SimError> {
        self.d
            .last()
            .get(pos)
            .ok_or_else(|| self.fail(format!("no position {pos:?} in {}", self.d.last())))
    }

    fn apply(&mut self, pos: &Position, rule: usize) -> Result<(), SimError> {
        if self.d.len() >= self.budget {
            return Err(RewriteError::BudgetExceeded { budget: self.budget }.into());
        }
        self.d.push(&self.sys.trs, pos, rule).map_err(|e| SimError::SimulationFailed {
            step: self.step,
            reason: format!("{} ({})", e, self.sys.label(rule)),
        })
    }

    fn g_at(&self, pos: &Position) -> Result<usize, SimError> {
        let u = self.at(pos)?;
        u.root()
            .and_then(|f| g_index(f))
            .ok_or_else(|| self.fail(format!("expected a g-node at {pos:?}, found {u}")))
    }

    /// `M^level_i(…)` at `pos` → `M^target_i(…)` by `8_{i,1}` at the root.
    fn lower(&mut self, pos: &Position, level: usize, target: usize) -> Result<(), SimError> {
        for _ in target..level {
            let i = self.g_at(pos)?;
            self.apply(pos, self.sys.rule8(i, 1))?;
        }
        Ok(())
    }

    /// `g_i(s(x), x̄) →⁺ g_i(x, x̄)` by `1_i` and `C` times `8_{i,1}`.
    fn decrement(&mut self, pos: &Position) -> Result<(), SimError> {
        let i = self.g_at(pos)?;
        self.apply(pos, self.sys.rule1(i))?;
        self.lower(pos, self.sys.params.c, 0)
    }

    /// `g_i(x, x̄) →⁺ c` by `2_i, …, 2_1` and `7`.
    fn erase(&mut self, pos: &Position) -> Result<(), SimError> {
        let mut i = self.g_at(pos)?;
        while i > 0 {
            self.apply(pos, self.sys.rule2(i))?;
            i -= 1;
        }
        self.apply(pos, self.sys.rule7())
    }

    /// At `pos` sits `M^level_i(s^{m-1}(0), tr(l1σ), …)` with `(i,m) = head`.
    fn run_one(&mut self, pos: &Position, level: usize, head: SccHeight, plan: &Plan) -> Result<(), SimError> {
        match plan {
            Plan::Descend(q) => {
                self.lower(pos, level, 0)?;
                for &j in q.indices() {
                    // below the M-tower each tr(w) keeps its own index
                    let i = self.g_at(pos)?;
                    self.apply(pos, self.sys.rule8(i, j))?;
                }
                Ok(())
            }
            Plan::Build {
                depth,
                children,
                target,
            } => {
                if *depth > level {
                    return Err(self.fail(format!("depth {depth} above M-level {level}")));
                }
                self.lower(pos, level, *depth)?;
                let a = self.sys.params.a;
                for j in 1..=a {
                    let cp = pos.child(j + 1);
                    match children.get(j - 1) {
                        Some(p) => self.run_one(&cp, depth - 1, head, p)?,
                        None if self.is_fill(&cp)? => {}
                        None => self.erase(&cp)?,
                    }
                }
                let here = SccHeight::new(head.rank, head.height - 1);
                self.fix_head(pos, here, *target)
            }
        }
    }

    fn is_fill(&self, pos: &Position) -> Result<bool, SimError> {
        let u = self.at(pos)?;
        Ok(u.args().is_empty() && u.root().is_some_and(|f| &**f == FILL))
    }

    /// `g_i(s^m(0), x̄)` at `pos` → `g_{i'}(s^{m'}(0), x̄)` for
    /// `(i,m) = from ≥ (i',m') = to`.
    fn fix_head(&mut self, pos: &Position, from: SccHeight, to: SccHeight) -> Result<(), SimError> {
        if from < to {
            return Err(self.fail(format!("sccheight increases from {from} to {to} at {pos:?}")));
        }
        if from.rank == to.rank {
            for _ in to.height..from.height {
                self.decrement(pos)?;
            }
            return Ok(());
        }
        for i in ((to.rank + 1)..=from.rank).rev() {
            self.apply(pos, self.sys.rule2(i))?;
        }
        self.settle(pos, to.height)
    }

    /// The first argument at `pos` is `f(size(u))` with `u` a `g`-node;
    /// evaluates it and decrements to `s^m(0)`.
    fn settle(&mut self, pos: &Position, m: usize) -> Result<(), SimError> {
        let fpos = pos.child(1);
        let v = self.eval_f(&fpos)?;
        if v < m {
            return Err(self.fail(format!("f yields {v} but the target height is {m}")));
        }
        for _ in m..v {
            self.decrement(pos)?;
        }
        Ok(())
    }

    /// Normalizes `f(size(u))` at `pos` to a numeral and returns its value.
    fn eval_f(&mut self, pos: &Position) -> Result<usize, SimError> {
        let f_trs = &self.sys.params.f_rules;
        let off = self.sys.f_offset();
        let here = self.at(pos)?.clone();
        // an f that ignores its argument needs no size evaluation
        let direct = derive(f_trs, &here, Strategy::LeftmostOutermost, self.budget);
        if numeral_value(direct.last()).is_some() {
            for s in &direct.steps {
                self.apply(&pos.concat(&s.redex), s.rule_index + off)?;
            }
        } else {
            self.eval_size(&pos.child(1))?;
            let here = self.at(pos)?.clone();
            let d = derive(f_trs, &here, Strategy::LeftmostOutermost, self.budget);
            for s in &d.steps {
                self.apply(&pos.concat(&s.redex), s.rule_index + off)?;
            }
        }
        let out = self.at(pos)?;
        numeral_value(out).ok_or_else(|| self.fail(format!("f does not normalize to a numeral: {out}")))
    }

    /// `size(u)` at `pos` →* `s^l(0)`, choosing at each `g`-node the argument
    /// with the largest value; returns `l`.
    fn eval_size(&mut self, pos: &Position) -> Result<usize, SimError> {
        let u = self.at(&pos.child(1))?.clone();
        if u.root().is_some_and(|f| &**f == FILL) && u.args().is_empty() {
            self.apply(pos, self.sys.rule4())?;
            return Ok(1);
        }
        let i = u
            .root()
            .and_then(|f| g_index(f))
            .ok_or_else(|| self.fail(format!("size applied to {u}")))?;
        let (j, _) = u.args()[1..]
            .iter()
            .enumerate()
            .map(|(j, x)| (j + 1, size_value(x, self.sys.params.a)))
            .max_by_key(|&(j, v)| (v, std::cmp::Reverse(j)))
            .ok_or_else(|| self.fail(format!("g-node without arguments: {u}")))?;
        self.apply(pos, self.sys.rule3(i, j))?;
        let inner = self.eval_size(&pos.child(1))?;
        // d_a(s^l(0)) →* s^{a·l}(0)
        let a = self.sys.params.a;
        let mut dpos = pos.clone();
        for _ in 0..inner {
            self.apply(&dpos, self.sys.rule5())?;
            for _ in 0..a {
                dpos = dpos.child(1);
            }
        }
        self.apply(&dpos, self.sys.rule6())?;
        Ok(a * inner)
    }

    /// `g^l(z)` at `pos` →* `tr(t)` with `l ≥ depth(t)`.
    fn seed(&mut self, pos: &Position, l: usize, plan: &SeedPlan) -> Result<(), SimError> {
        let k = self.sys.params.k;
        let mut l = l;
        while l > plan.depth {
            self.apply(pos, self.sys.rule9())?;
            self.apply(pos, self.sys.rule8(k, 1))?;
            l -= 1;
        }
        if l == 0 {
            self.apply(pos, self.sys.rule10())?;
        } else {
            self.apply(pos, self.sys.rule9())?;
            // size(g_0(0, x̄)) holds a second copy of the arguments
            let inner = pos.child(1).child(1).child(1);
            for j in 1..=self.sys.params.a {
                for base in [pos, &inner] {
                    let cp = base.child(j + 1);
                    match plan.children.get(j - 1) {
                        Some(p) => self.seed(&cp, l - 1, p)?,
                        None => {
                            let top = if l == 1 { self.sys.rule10() } else { self.sys.rule9() };
                            self.apply(&cp, top)?;
                            self.erase(&cp)?;
                        }
                    }
                }
            }
        }
        for i in ((plan.target.rank + 1)..=k).rev() {
            self.apply(pos, self.sys.rule2(i))?;
        }
        self.settle(pos, plan.target.height)
    }

    fn finish(self) -> Result<Derivation, SimError> {
        self.d
            .validate(&self.sys.trs)
            .map_err(|e| SimError::SimulationFailed { step: self.step, reason: e.to_string() })?;
        Ok(self.d)
    }
}

/// The numeral `size(u)` reaches under the max-argument choice.
fn size_value(u: &Term, a: usize) -> usize {
    if u.args().is_empty() {
        return 1;
    }
    a * u.args()[1..].iter().map(|x| size_value(x, a)).max().unwrap_or(0)
}

/// Validated witness `size(u) →* s^l(0)`; returns the derivation and `l`.
pub fn size_witness(system: &SimSystem, u: &Term, budget: usize) -> Result<(Derivation, usize), SimError> {
    let mut b = Builder {
        sys: system,
        d: Derivation::empty(Term::app(SIZE, vec![u.clone()])),
        step: 0,
        budget,
    };
    let l = b.eval_size(&Position::root())?;
    Ok((b.finish()?, l))
}

/// One `R_sim ∪ R'` witness per step of `d`.
pub fn simulate_derivation(
    trs: &Trs,
    dg: &DependencyGraph,
    p: &SimParams,
    d: &Derivation,
    budget: usize,
) -> Result<Vec<Derivation>, SimError> {
    let mut ctx = SimContext::with_graph(trs, dg, p.clone(), budget)?;
    d.steps
        .iter()
        .enumerate()
        .map(|(i, s)| ctx.simulate_step(i, s))
        .collect()
}

/// Validated `g^depth(t)(z) →* tr(t)`.
pub fn seed_term_derivation(
    trs: &Trs,
    dg: &DependencyGraph,
    p: &SimParams,
    t: &Term,
    budget: usize,
) -> Result<Derivation, SimError> {
    SimContext::with_graph(trs, dg, p.clone(), budget)?.seed(t)
}

/// Fewest steps (at least one) from `from` to `to`, searching at most
/// `max_steps` deep.
pub fn reachable_within(trs: &Trs, from: &Term, to: &Term, max_steps: usize) -> Option<usize> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(from.clone(), 0usize)]);
    while let Some((u, n)) = queue.pop_front() {
        if n >= max_steps {
            continue;
        }
        for s in one_step_reducts(trs, &u) {
            if &s.target == to {
                return Some(n + 1);
            }
            if seen.insert(s.target.clone()) {
                queue.push_back((s.target, n + 1));
            }
        }
    }
    None
}

/// A derivation of length `dh(t, →_R)` from `t`.
pub fn longest_derivation(trs: &Trs, t: &Term, budget: usize) -> Result<Derivation, SimError> {
    let mut cache = HeightCache::new(trs, budget);
    let mut d = Derivation::empty(t.clone());
    let mut h = cache.dh(t)?;
    while h > 0 {
        let next = one_step_reducts(trs, d.last())
            .into_iter()
            .find_map(|s| match cache.dh(&s.target) {
                Ok(v) if v + 1 == h => Some(Ok(s)),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
            .ok_or_else(|| SimError::SimulationFailed { step: d.len(), reason: "no reduct continues the longest derivation".into() })??;
        d.steps.push(next);
        h -= 1;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::super::{f_constant, f_linear, m_term, numeral};
    use super::*;
    use crate::dp::{dependency_pairs, estimated_dependency_graph};
    use crate::rewrite::parse_trace;
    use crate::term::{parse_term, parse_trs};

    fn rb() -> Trs {
        parse_trs("(VAR x) (RULES f(x) -> g(c,x) g(x,x) -> h(x,x) c -> d)").unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &[]).unwrap()
    }

    fn rb_params() -> SimParams {
        SimParams { a: 2, c: 2, k: 2, f_rules: f_constant(1) }
    }

    #[test]
    fn rb_simulation() {
        let trs = rb();
        let dg = estimated_dependency_graph(&dependency_pairs(&trs));
        let d = parse_trace(&trs, "f(f(c))\n@1 #1\nf(g(c,c))\n@1 #2\nf(h(c,c))\n@1.2 #3\nf(h(c,d))\n").unwrap();
        let ws = simulate_derivation(&trs, &dg, &rb_params(), &d, 100_000).unwrap();
        assert_eq!(ws.len(), 3);
        let mut ctx = SimContext::new(&trs, rb_params(), 100_000).unwrap();
        for (w, s) in ws.iter().zip(&d.steps) {
            assert!(w.len() >= 1);
            assert_eq!(w.initial, ctx.tr(&s.source).unwrap());
            assert_eq!(w.last(), &ctx.tr(&s.target).unwrap());
        }
        // the first witness follows the displayed route
        assert_eq!(
            ws[0].term(1),
            &t("g_2(s(0),g_2(0,g_2(0,g_2(0,g_0(s(0),c,c),c),g_2(0,g_0(s(0),c,c),c)),g_2(0,g_2(0,g_0(s(0),c,c),c),g_2(0,g_0(s(0),c,c),c))),c)")
        );
        assert_eq!(ws[0].len(), 7);
    }

    #[test]
    fn rd_simulation() {
        let trs = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))))").unwrap();
        let trs = Trs::with_symbols(trs.rules().to_vec(), [(crate::term::sym("0"), 0)]).unwrap();
        let d = parse_trace(
            &trs,
            "f(s(s(0)))\n@ #1\ns(f(f(s(0))))\n@1.1 #1\ns(f(s(f(f(0)))))\n@1 #1\ns(s(f(f(f(f(0))))))\n",
        )
        .unwrap();
        let p = SimParams::for_trs(&trs, f_linear(1, 0));
        assert_eq!((p.a, p.c, p.k), (2, 3, 1));
        let dg = estimated_dependency_graph(&dependency_pairs(&trs));
        let ws = simulate_derivation(&trs, &dg, &p, &d, 1_000_000).unwrap();
        assert_eq!(ws.len(), 3);
    }

    #[test]
    fn seeds_rb() {
        let trs = rb();
        let mut ctx = SimContext::new(&trs, rb_params(), 100_000).unwrap();
        for s in ["c", "d", "f(c)", "g(c,d)", "f(f(c))", "h(g(c,c),d)"] {
            let d = ctx.seed(&t(s)).unwrap();
            assert_eq!(d.initial, Term::iterate("g", t(s).depth(), Term::constant("z")));
            assert_eq!(d.last(), &ctx.tr(&t(s)).unwrap());
        }
        let c = ctx.seed(&t("c")).unwrap();
        assert_eq!(c.term(1), &t("g_2(f(size(g_0(0,c,c))),c,c)"));
    }

    #[test]
    fn decrement_and_erase_on_open_terms() {
        let sys = SimSystem::new(rb_params()).unwrap();
        let x = Term::var("x");
        let xs = [Term::var("x1"), Term::var("x2")];
        for i in 0..=2 {
            let mut b = Builder { sys: &sys, d: Derivation::empty(m_term(i, 0, &Term::app("s", vec![x.clone()]), &xs)), step: 0, budget: 100 };
            b.decrement(&Position::root()).unwrap();
            assert_eq!(b.d.last(), &m_term(i, 0, &x, &xs));
            let mut b = Builder { sys: &sys, d: Derivation::empty(m_term(i, 0, &x, &xs)), step: 0, budget: 100 };
            b.erase(&Position::root()).unwrap();
            assert_eq!(b.d.last(), &Term::constant("c"));
        }
    }

    #[test]
    fn size_bounds_term_size() {
        let trs = rb();
        let mut ctx = SimContext::new(&trs, rb_params(), 100_000).unwrap();
        for s in ["c", "f(c)", "g(f(c),h(c,d))"] {
            let enc = ctx.tr(&t(s)).unwrap();
            let (_, l) = size_witness(&ctx.system, &enc, 100_000).unwrap();
            assert!(l >= t(s).size(), "{s}: {l}");
        }
        assert_eq!(numeral(0), t("0"));
    }

    #[test]
    fn bfs_reachability() {
        let sys = SimSystem::new(rb_params()).unwrap();
        let from = t("g_2(0, g_0(s(0),c,c), c)");
        assert_eq!(reachable_within(&sys.trs, &from, &t("g_0(s(0),c,c)"), 3), Some(1));
        assert_eq!(reachable_within(&sys.trs, &from, &t("z"), 3), None);
    }
}
