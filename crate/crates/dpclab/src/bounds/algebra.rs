//! Interpretations over the naturals: a small expression language, exact
//! comparison of affine interpretations, and grid sampling for the rest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::{BoundReport, BoundsError, Inequality, Rel};
use crate::rewrite::{empirical_complexity, ComplexityMode};
use crate::term::{cartesian, sym, Rule, Sym, Term, Trs};

const MAX_BITS: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(BigUint),
    /// Parameter by position.
    Param(usize),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Constant base raised to an expression.
    Pow(BigUint, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, args: &[BigUint]) -> Result<BigUint, BoundsError> {
        Ok(match self {
            Expr::Num(n) => n.clone(),
            Expr::Param(i) => args[*i].clone(),
            Expr::Add(a, b) => a.eval(args)? + b.eval(args)?,
            Expr::Mul(a, b) => a.eval(args)? * b.eval(args)?,
            Expr::Pow(base, e) => {
                let e = e.eval(args)?;
                if base.is_zero() || base.is_one() {
                    if e.is_zero() {
                        BigUint::one()
                    } else {
                        base.clone()
                    }
                } else {
                    let small = e.to_u64().filter(|e| e.saturating_mul(base.bits()) <= MAX_BITS);
                    let e = small.ok_or_else(|| BoundsError::ArgumentTooLarge {
                        what: format!("{base}^{e}"),
                    })?;
                    base.pow(e as u32)
                }
            }
        })
    }

    fn affine(&self, args: &[Affine]) -> Option<Affine> {
        Some(match self {
            Expr::Num(n) => Affine::constant(n.clone()),
            Expr::Param(i) => args[*i].clone(),
            Expr::Add(a, b) => a.affine(args)?.add(&b.affine(args)?),
            Expr::Mul(a, b) => {
                let (x, y) = (a.affine(args)?, b.affine(args)?);
                if x.is_constant() {
                    y.scale(&x.c0)
                } else if y.is_constant() {
                    x.scale(&y.c0)
                } else {
                    return None;
                }
            }
            Expr::Pow(base, e) => {
                let e = e.affine(args)?;
                if !e.is_constant() {
                    return None;
                }
                Affine::constant(Expr::Pow(base.clone(), Box::new(Expr::Num(e.c0))).eval(&[]).ok()?)
            }
        })
    }
}

/// `c0 + Σ ci·xi` over rule variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub c0: BigUint,
    pub coeffs: BTreeMap<Sym, BigUint>,
}

impl Affine {
    pub fn constant(c0: BigUint) -> Self {
        Affine {
            c0,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn var(x: &Sym) -> Self {
        Affine {
            c0: BigUint::zero(),
            coeffs: [(x.clone(), BigUint::one())].into_iter().collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.values().all(Zero::is_zero)
    }

    fn add(&self, o: &Affine) -> Affine {
        let mut out = self.clone();
        out.c0 += &o.c0;
        for (x, c) in &o.coeffs {
            *out.coeffs.entry(x.clone()).or_default() += c;
        }
        out
    }

    fn scale(&self, k: &BigUint) -> Affine {
        Affine {
            c0: &self.c0 * k,
            coeffs: self.coeffs.iter().map(|(x, c)| (x.clone(), c * k)).collect(),
        }
    }

    /// `self > other` (or `≥`) for every assignment of naturals.
    pub fn dominates(&self, other: &Affine, strict: bool) -> bool {
        let zero = BigUint::zero();
        let coeffs_ok = other
            .coeffs
            .iter()
            .all(|(x, c)| self.coeffs.get(x).unwrap_or(&zero) >= c);
        coeffs_ok && if strict { self.c0 > other.c0 } else { self.c0 >= other.c0 }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(x, c)| if c.is_one() { x.to_string() } else { format!("{c}*{x}") })
            .collect();
        if !self.c0.is_zero() || parts.is_empty() {
            parts.push(self.c0.to_string());
        }
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interp {
    pub params: Vec<String>,
    pub body: Expr,
}

/// Symbol interpretations; unlisted symbols are an error when met.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Algebra(pub BTreeMap<Sym, Interp>);

impl Algebra {
    fn interp(&self, f: &Sym, arity: usize) -> Result<&Interp, BoundsError> {
        let i = self.0.get(f).ok_or_else(|| BoundsError::MissingInterpretation { symbol: f.to_string() })?;
        if i.params.len() != arity {
            return Err(BoundsError::ArityMismatch {
                symbol: f.to_string(),
                expected: arity,
                found: i.params.len(),
            });
        }
        Ok(i)
    }

    /// `[α](t)` for an assignment of the variables of `t`.
    pub fn eval(&self, t: &Term, alpha: &BTreeMap<Sym, BigUint>) -> Result<BigUint, BoundsError> {
        match t {
            Term::Var(x) => Ok(alpha.get(x).cloned().unwrap_or_default()),
            Term::App(f, args) => {
                let i = self.interp(f, args.len())?;
                let vals = args.iter().map(|a| self.eval(a, alpha)).collect::<Result<Vec<_>, _>>()?;
                i.body.eval(&vals)
            }
        }
    }

    pub fn affine(&self, t: &Term) -> Result<Affine, BoundsError> {
        match t {
            Term::Var(x) => Ok(Affine::var(x)),
            Term::App(f, args) => {
                let i = self.interp(f, args.len())?;
                let vals = args.iter().map(|a| self.affine(a)).collect::<Result<Vec<_>, _>>()?;
                i.body.affine(&vals).ok_or_else(|| BoundsError::NonAffine { symbol: f.to_string() })
            }
        }
    }
}

struct Lexer<'a> {
    s: &'a [u8],
    i: usize,
    line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigUint),
    Ident(String),
    Op(char),
}

impl Lexer<'_> {
    fn err(&self, msg: impl Into<String>) -> BoundsError {
        BoundsError::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<Tok>, BoundsError> {
        let mut out = Vec::new();
        while self.i < self.s.len() {
            let c = self.s[self.i] as char;
            if c.is_whitespace() {
                self.i += 1;
            } else if c.is_ascii_digit() {
                let st = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let txt = std::str::from_utf8(&self.s[st..self.i]).expect("ascii");
                out.push(Tok::Num(txt.parse().expect("digits")));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let st = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || b"_'".contains(&self.s[self.i])) {
                    self.i += 1;
                }
                out.push(Tok::Ident(String::from_utf8(self.s[st..self.i].to_vec()).expect("ascii")));
            } else if "+*^()".contains(c) {
                out.push(Tok::Op(c));
                self.i += 1;
            } else {
                return Err(self.err(format!("unexpected character `{c}`")));
            }
        }
        Ok(out)
    }
}

struct ExprParser<'a> {
    toks: Vec<Tok>,
    i: usize,
    params: &'a [String],
    line: usize,
}

impl ExprParser<'_> {
    fn err(&self, msg: impl Into<String>) -> BoundsError {
        BoundsError::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, BoundsError> {
        let mut e = self.product()?;
        while self.eat('+') {
            e = Expr::Add(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr, BoundsError> {
        let mut e = self.power()?;
        while self.eat('*') {
            e = Expr::Mul(Box::new(e), Box::new(self.power()?));
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr, BoundsError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let Expr::Num(b) = base else {
            return Err(self.err("the base of `^` must be a constant"));
        };
        Ok(Expr::Pow(b, Box::new(self.power()?)))
    }

    fn atom(&mut self) -> Result<Expr, BoundsError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(x)) => {
                self.i += 1;
                self.params
                    .iter()
                    .position(|p| *p == x)
                    .map(Expr::Param)
                    .ok_or_else(|| self.err(format!("unknown parameter `{x}`")))
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            other => Err(self.err(format!("unexpected {other:?}"))),
        }
    }
}

/// Parses `+`, `*`, `^` (constant base), numbers, parentheses and the given
/// parameter names.
pub fn parse_expr(text: &str, params: &[String]) -> Result<Expr, BoundsError> {
    parse_expr_at(text, params, 1)
}

fn parse_expr_at(text: &str, params: &[String], line: usize) -> Result<Expr, BoundsError> {
    let toks = Lexer {
        s: text.as_bytes(),
        i: 0,
        line,
    }
    .tokens()?;
    let mut p = ExprParser { toks, i: 0, params, line };
    let e = p.sum()?;
    if p.i != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// One definition per line, `f(x,y) = expr` or `c = expr`; `%` starts a
/// comment. Symbol names may contain any character except `(`, `=` and
/// whitespace.
pub fn parse_algebra(text: &str) -> Result<Algebra, BoundsError> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.split('%').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let err = |msg: &str| BoundsError::Parse {
            line,
            msg: msg.to_string(),
        };
        let (head, body) = l.split_once('=').ok_or_else(|| err("expected `=`"))?;
        let head = head.trim();
        let (name, params) = match head.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.trim_end().strip_suffix(')').ok_or_else(|| err("expected `)`"))?;
                let ps: Vec<String> = inner
                    .split(',')
                    .map(|p| p.trim().to_string())
                    .filter(|p| !p.is_empty())
                    .collect();
                (name.trim(), ps)
            }
            None => (head, Vec::new()),
        };
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(err("bad symbol name"));
        }
        let body = parse_expr_at(body, &params, line)?;
        map.insert(sym(name), Interp { params, body });
    }
    Ok(Algebra(map))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraMode {
    LinearExact,
    /// Every assignment over `0..=grid`; can only refute.
    Sampled { grid: usize },
}

/// Rules to orient strictly and weakly.
#[derive(Clone, Debug, Default)]
pub struct Orientation {
    pub strict: Vec<Rule>,
    pub weak: Vec<Rule>,
}

pub fn check_algebra(problem: &Orientation, alg: &Algebra, mode: AlgebraMode) -> Result<BoundReport, BoundsError> {
    let mut report = BoundReport::new(match mode {
        AlgebraMode::LinearExact => "algebra_linear_exact".to_string(),
        AlgebraMode::Sampled { grid } => format!("algebra_sampled_{grid}"),
    });
    let rules = problem
        .strict
        .iter()
        .map(|r| (r, true))
        .chain(problem.weak.iter().map(|r| (r, false)));
    for (rule, strict) in rules {
        let rel = if strict { Rel::Gt } else { Rel::Ge };
        match mode {
            AlgebraMode::LinearExact => {
                let (l, r) = (alg.affine(&rule.lhs)?, alg.affine(&rule.rhs)?);
                let holds = l.dominates(&r, strict);
                report.push(Inequality::symbolic(rule.to_string(), l.to_string(), rel, r.to_string(), holds));
            }
            AlgebraMode::Sampled { grid } => {
                report.push(sample_rule(rule, strict, alg, grid)?);
            }
        }
    }
    if let AlgebraMode::Sampled { grid } = mode {
        report.witness("soundness", format!("refutation only, grid 0..={grid}"));
    }
    Ok(report)
}

/// Records the tightest assignment, or the first violating one.
fn sample_rule(rule: &Rule, strict: bool, alg: &Algebra, grid: usize) -> Result<Inequality, BoundsError> {
    let vars = rule.lhs.vars();
    let pool: Vec<BigUint> = (0..=grid).map(BigUint::from).collect();
    let pools = vec![pool; vars.len()];
    let mut tightest: Option<(BigInt, BigUint, BigUint, String)> = None;
    let mut failure = None;
    cartesian(&pools, &mut |vals| {
        if failure.is_some() {
            return;
        }
        let alpha: BTreeMap<Sym, BigUint> = vars.iter().cloned().zip(vals.iter().cloned()).collect();
        let (l, r) = match (alg.eval(&rule.lhs, &alpha), alg.eval(&rule.rhs, &alpha)) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => {
                failure = Some(Err(e));
                return;
            }
        };
        let gap = BigInt::from(l.clone()) - BigInt::from(r.clone());
        let at = vars.iter().zip(vals).map(|(x, v)| format!("{x}={v}")).collect::<Vec<_>>().join(",");
        let ok = if strict { gap > BigInt::zero() } else { gap >= BigInt::zero() };
        if !ok {
            failure = Some(Ok((l, r, at)));
        } else if tightest.as_ref().map_or(true, |t| gap < t.0) {
            tightest = Some((gap, l, r, at));
        }
    });
    let rel = if strict { Rel::Gt } else { Rel::Ge };
    match failure {
        Some(Err(e)) => Err(e),
        Some(Ok((l, r, at))) => Ok(Inequality::symbolic(format!("{rule} at {at}"), l.to_string(), rel, r.to_string(), false)),
        None => {
            let (_, l, r, at) = tightest.expect("at least the empty assignment");
            Ok(Inequality::symbolic(format!("{rule} at {at}"), l.to_string(), rel, r.to_string(), true))
        }
    }
}

/// Compatibility of `alg` with `trs`, domination of every interpretation by
/// `p` on the diagonal up to `grid`, and `Dc(m) ≤ p^m(0)` for `m ≤ n`.
pub fn check_dc_bound_from_algebra(
    trs: &Trs,
    alg: &Algebra,
    p: &Expr,
    n: usize,
    grid: usize,
    budget: usize,
) -> Result<BoundReport, BoundsError> {
    let problem = Orientation {
        strict: trs.rules().to_vec(),
        weak: Vec::new(),
    };
    let compat = match check_algebra(&problem, alg, AlgebraMode::LinearExact) {
        Err(BoundsError::NonAffine { .. }) => check_algebra(&problem, alg, AlgebraMode::Sampled { grid })?,
        other => other?,
    };
    if let Some(bad) = compat.inequalities.iter().find(|i| !i.holds) {
        return Err(BoundsError::IncompatibleAlgebra { rule: bad.label.clone() });
    }
    let mut report = BoundReport::new("dc_bound_from_algebra");
    let symbols: BTreeSet<(Sym, usize)> = trs.signature().iter().map(|(f, a)| (f.clone(), *a)).collect();
    for k in 0..=grid {
        let kb = BigUint::from(k);
        let pk = p.eval(&[kb.clone()])?;
        for (f, a) in &symbols {
            let i = alg.interp(f, *a)?;
            let v = i.body.eval(&vec![kb.clone(); *a])?;
            report.push(Inequality::num(format!("p({k}) >= {f}_A({k},...)"), &pk, Rel::Ge, &v));
        }
    }
    let rows = empirical_complexity(trs, n, ComplexityMode::Dc, budget)?;
    let mut bound = BigUint::zero();
    for row in rows {
        bound = p.eval(&[bound])?;
        report.push(Inequality::num(
            format!("Dc({}) <= p^{}(0)", row.size, row.size),
            &BigUint::from(row.value),
            Rel::Le,
            &bound,
        ));
    }
    report.witness("compatibility", compat.check);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{dependency_pairs, usable_rules};
    use crate::rewrite::DEFAULT_BUDGET;
    use crate::term::parse_trs;

    fn params(ps: &[&str]) -> Vec<String> {
        ps.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn expressions() {
        let e = parse_expr("2^m*(n+1)+1", &params(&["m", "n"])).unwrap();
        assert_eq!(e.eval(&[BigUint::from(3u32), BigUint::from(4u32)]).unwrap(), BigUint::from(41u32));
        assert!(parse_expr("m^2", &params(&["m"])).is_err());
        assert!(parse_expr("q", &params(&["m"])).is_err());
        assert!(parse_expr("1 +", &params(&[])).is_err());
    }

    #[test]
    fn rde_linear_pair() {
        let rde = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))) f(x) -> c(x,x))").unwrap();
        let dp = dependency_pairs(&rde);
        let alg = parse_algebra("f#(m) = m\nf(m) = m\ns(m) = m + 1\nc(m,n) = 0\n0 = 0\n").unwrap();
        let problem = Orientation {
            strict: dp.pairs.clone(),
            weak: rde.rules().to_vec(),
        };
        let r = check_algebra(&problem, &alg, AlgebraMode::LinearExact).unwrap();
        assert!(r.pass(), "{r:?}");
        let s = check_algebra(&problem, &alg, AlgebraMode::Sampled { grid: 6 }).unwrap();
        assert!(s.pass());
    }

    #[test]
    fn example_6_1_sampled() {
        let rebin = parse_trs("(VAR x y) (RULES d(0) -> 0 d(s(x)) -> s(s(d(x))) e(0,x) -> x e(s(x),y) -> e(x,d(y)))").unwrap();
        let dp = dependency_pairs(&rebin);
        let u = usable_rules(&dp);
        let alg = parse_algebra(
            "e#(m,n) = 2^m*(n+1)+1\nd#(m) = m\nd(m) = 2*m\ns(m) = m+1\n0 = 0\nc_e#cons(m,n) = m+n\n",
        )
        .unwrap();
        let problem = Orientation {
            strict: dp.pairs.clone(),
            weak: u.with_ce(&dp).rules().to_vec(),
        };
        let r = check_algebra(&problem, &alg, AlgebraMode::Sampled { grid: 6 }).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(matches!(
            check_algebra(&problem, &alg, AlgebraMode::LinearExact),
            Err(BoundsError::NonAffine { .. })
        ));
    }

    #[test]
    fn irreflexive() {
        let t = parse_trs("(RULES a -> a)").unwrap();
        let alg = parse_algebra("a = 5").unwrap();
        let problem = Orientation {
            strict: t.rules().to_vec(),
            weak: vec![],
        };
        for mode in [AlgebraMode::LinearExact, AlgebraMode::Sampled { grid: 3 }] {
            assert!(!check_algebra(&problem, &alg, mode).unwrap().pass());
        }
        let missing = parse_algebra("b = 1").unwrap();
        assert!(matches!(
            check_algebra(&problem, &missing, AlgebraMode::LinearExact),
            Err(BoundsError::MissingInterpretation { .. })
        ));
    }

    #[test]
    fn dc_bounds() {
        let ab = parse_trs("(RULES a -> b)").unwrap();
        let alg = parse_algebra("a = 1\nb = 0").unwrap();
        let p = parse_expr("n+1", &params(&["n"])).unwrap();
        let r = check_dc_bound_from_algebra(&ab, &alg, &p, 3, 6, DEFAULT_BUDGET).unwrap();
        assert!(r.pass(), "{r:?}");

        let re = parse_trs("(VAR x) (RULES d(s(x)) -> s(s(d(x))))").unwrap();
        let re = Trs::with_symbols(re.rules().to_vec(), [(sym("0"), 0)]).unwrap();
        let alg = parse_algebra("s(n) = n+1\nd(n) = 3*n+2\n0 = 0").unwrap();
        let p = parse_expr("3*n+2", &params(&["n"])).unwrap();
        let r = check_dc_bound_from_algebra(&re, &alg, &p, 5, 6, DEFAULT_BUDGET).unwrap();
        assert!(r.pass(), "{r:?}");

        let bad = parse_algebra("s(n) = n+1\nd(n) = n\n0 = 0").unwrap();
        assert!(matches!(
            check_dc_bound_from_algebra(&re, &bad, &p, 5, 6, DEFAULT_BUDGET),
            Err(BoundsError::IncompatibleAlgebra { .. })
        ));
    }
}
