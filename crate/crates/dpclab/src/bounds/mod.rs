//! Executable forms of the depth, string-rewriting and usable-rules bounds,
//! plus algebra checks for reduction pairs.

mod algebra;
mod ig;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::dp::{dependency_pairs, sharp};
use crate::progeny::{progenitor_graph, ProgenyError};
use crate::rewrite::{Derivation, RelativeCache, RewriteError};
use crate::term::{Term, Trs};

pub use algebra::{
    check_algebra, check_dc_bound_from_algebra, parse_algebra, parse_expr, Affine, Algebra, AlgebraMode, Expr,
    Orientation,
};
pub use ig::{
    closed_form_holds, e_constant, g_bound, g_lower, ig_symbols, ig_transform, big_g, big_h, h_bound, le_pow,
    IgImage, G_MAX_M, G_MAX_N,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("no interpretation for `{symbol}`")]
    MissingInterpretation { symbol: String },
    #[error("interpretation of `{symbol}` is not affine")]
    NonAffine { symbol: String },
    #[error("argument too large for exact evaluation: {what}")]
    ArgumentTooLarge { what: String },
    #[error("not a string rewrite system (symbol `{symbol}` has arity > 1)")]
    NotAnSrs { symbol: String },
    #[error("algebra does not orient {rule} strictly")]
    IncompatibleAlgebra { rule: String },
    #[error("algebra line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("`{symbol}` has arity {expected} but the interpretation takes {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Progeny(#[from] ProgenyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rel {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        })
    }
}

/// One recorded inequality `lhs rel rhs`. Sides are decimal numbers or, for
/// values too large to print, a symbolic form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub label: String,
    pub lhs: String,
    pub rel: Rel,
    pub rhs: String,
    pub holds: bool,
}

impl Inequality {
    pub fn num(label: impl Into<String>, lhs: &BigUint, rel: Rel, rhs: &BigUint) -> Self {
        let holds = match rel {
            Rel::Le => lhs <= rhs,
            Rel::Lt => lhs < rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        };
        Inequality {
            label: label.into(),
            lhs: lhs.to_string(),
            rel,
            rhs: rhs.to_string(),
            holds,
        }
    }

    pub fn small(label: impl Into<String>, lhs: usize, rel: Rel, rhs: usize) -> Self {
        Self::num(label, &BigUint::from(lhs), rel, &BigUint::from(rhs))
    }

    pub fn symbolic(label: impl Into<String>, lhs: String, rel: Rel, rhs: String, holds: bool) -> Self {
        Inequality {
            label: label.into(),
            lhs,
            rel,
            rhs,
            holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub check: String,
    pass: bool,
    pub inequalities: Vec<Inequality>,
    pub witness: BTreeMap<String, String>,
}

impl BoundReport {
    pub fn new(check: impl Into<String>) -> Self {
        BoundReport {
            check: check.into(),
            pass: true,
            inequalities: Vec::new(),
            witness: BTreeMap::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.pass
    }

    pub fn push(&mut self, ineq: Inequality) {
        self.pass &= ineq.holds;
        self.inequalities.push(ineq);
    }

    pub fn witness(&mut self, key: &str, value: impl ToString) {
        self.witness.insert(key.to_string(), value.to_string());
    }

    /// `{check, pass, lhs, rhs, witness}`; `lhs`/`rhs` list the sides of
    /// every inequality in order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "check": self.check,
            "pass": self.pass,
            "lhs": self.inequalities.iter().map(|i| &i.lhs).collect::<Vec<_>>(),
            "rhs": self.inequalities.iter().map(|i| &i.rhs).collect::<Vec<_>>(),
            "relations": self.inequalities.iter().map(|i| (&i.label, i.rel.to_string())).collect::<Vec<_>>(),
            "witness": self.witness,
        })
    }
}

/// `max{dh(u♯, →DP(R)/R) | u ⊴ t}`
pub fn max_subterm_dp_height(trs: &Trs, t: &Term, budget: usize) -> Result<usize, BoundsError> {
    let dp = dependency_pairs(trs);
    let mut cache = RelativeCache::new(&dp.pairs_trs(), trs, budget);
    let mut m = 0;
    for p in t.positions() {
        let u = t.get(&p).expect("own position");
        m = m.max(cache.dh(&sharp(trs, u))?);
    }
    Ok(m)
}

fn pow(c: usize, e: usize) -> BigUint {
    BigUint::from(c).pow(e as u32)
}

/// `depth(t) ≤ |s|·C^(m+2)` for `d: s →* t`.
pub fn check_depth_bound(trs: &Trs, d: &Derivation, budget: usize) -> Result<BoundReport, BoundsError> {
    let s = &d.initial;
    let t = d.last();
    let m = max_subterm_dp_height(trs, s, budget)?;
    let c = trs.branching_constant();
    let mut r = BoundReport::new("depth_bound");
    r.push(Inequality::num(
        "depth(t) <= |s|*C^(m+2)",
        &BigUint::from(t.depth()),
        Rel::Le,
        &(BigUint::from(s.size()) * pow(c, m + 2)),
    ));
    r.witness("C", c);
    r.witness("m", m);
    r.witness("start", s);
    r.witness("steps", d.len());
    Ok(r)
}

/// Node count of the progenitor graph against the derivation length, and
/// `n ≤ |s|·C^(m+1)`.
pub fn check_srs_bounds(srs: &Trs, d: &Derivation, budget: usize) -> Result<BoundReport, BoundsError> {
    if let Some((f, _)) = srs.signature().iter().find(|(_, n)| **n > 1) {
        return Err(BoundsError::NotAnSrs { symbol: f.to_string() });
    }
    let g = progenitor_graph(srs, d)?;
    let m = max_subterm_dp_height(srs, &d.initial, budget)?;
    let c = srs.branching_constant();
    let mut r = BoundReport::new("srs_bounds");
    r.push(Inequality::small("nodes(G) >= steps", g.nodes.len(), Rel::Ge, d.len()));
    r.push(Inequality::num(
        "steps <= |s|*C^(m+1)",
        &BigUint::from(d.len()),
        Rel::Le,
        &(BigUint::from(d.initial.size()) * pow(c, m + 1)),
    ));
    r.witness("C", c);
    r.witness("m", m);
    r.witness("nodes", g.nodes.len());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{parse_trace, DEFAULT_BUDGET};
    use crate::term::parse_trs;

    #[test]
    fn depth_bound_rd() {
        let rd = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))))").unwrap();
        let d = parse_trace(
            &rd,
            "f(s(s(0)))\n@ #1\ns(f(f(s(0))))\n@1.1 #1\ns(f(s(f(f(0)))))\n@1 #1\ns(s(f(f(f(f(0))))))\n",
        )
        .unwrap();
        let r = check_depth_bound(&rd, &d, DEFAULT_BUDGET).unwrap();
        assert!(r.pass());
        assert_eq!(r.inequalities[0].lhs, "6");
        assert_eq!(r.inequalities[0].rhs, "324");
        assert_eq!(r.witness["m"], "2");
    }

    #[test]
    fn srs_re() {
        let re = parse_trs("(VAR x) (RULES d(s(x)) -> s(s(d(x))))").unwrap();
        let d = parse_trace(&re, "d(s(s(0)))\n@ #1\ns(s(d(s(0))))\n@1.1 #1\ns(s(s(s(d(0)))))\n").unwrap();
        let r = check_srs_bounds(&re, &d, DEFAULT_BUDGET).unwrap();
        assert!(r.pass());
        assert_eq!((r.inequalities[0].lhs.as_str(), r.inequalities[0].rhs.as_str()), ("3", "2"));
        assert_eq!(r.inequalities[1].rhs, "108");
        let e = Derivation::empty(d.initial.clone());
        assert!(check_srs_bounds(&re, &e, DEFAULT_BUDGET).unwrap().pass());
        let rb = parse_trs("(VAR x) (RULES g(x,x) -> x)").unwrap();
        assert!(matches!(
            check_srs_bounds(&rb, &Derivation::empty(Term::constant("a")), 10),
            Err(BoundsError::NotAnSrs { .. })
        ));
    }
}
