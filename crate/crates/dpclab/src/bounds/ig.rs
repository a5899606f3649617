//! The list interpretation of non-usable symbols and the size bounds on it.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::BoundsError;
use crate::dp::{dependency_pairs, usable_rules};
use crate::rewrite::{one_step_reducts, RewriteError};
use crate::term::{sym, Sym, Term, Trs};

/// `g` is evaluated exactly only inside this range.
pub const G_MAX_M: usize = 8;
pub const G_MAX_N: usize = 2;

/// Largest bit length allowed for the tower helpers.
const MAX_BITS: u64 = 1 << 22;

/// `E = max{2, a, b, c} + 3` with `c` one more than the largest right-hand
/// side size or variable multiplicity.
pub fn e_constant(trs: &Trs) -> usize {
    let a = trs.max_arity();
    let b = trs.len();
    let c = 1 + trs
        .rules()
        .iter()
        .map(|r| {
            let occ = r.rhs.vars().iter().map(|x| r.rhs.var_occurrences(x)).max().unwrap_or(0);
            occ.max(r.rhs.size())
        })
        .max()
        .unwrap_or(0);
    [2, a, b, c].into_iter().max().expect("nonempty") + 3
}

/// `G`: roots of rules outside `U(DP(R))`.
pub fn ig_symbols(trs: &Trs) -> BTreeSet<Sym> {
    let dp = dependency_pairs(trs);
    let u = usable_rules(&dp);
    trs.rules()
        .iter()
        .enumerate()
        .filter(|(i, _)| !u.usable.contains(i))
        .map(|(_, r)| r.root().clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IgImage {
    pub image: Term,
    pub size: usize,
}

/// Size first, then the preorder symbol sequence.
fn order_key(t: &Term) -> (usize, Vec<Sym>) {
    fn flat(t: &Term, out: &mut Vec<Sym>) {
        match t {
            Term::Var(x) => out.push(x.clone()),
            Term::App(f, args) => {
                out.push(f.clone());
                args.iter().for_each(|a| flat(a, out));
            }
        }
    }
    let mut v = Vec::new();
    flat(t, &mut v);
    (t.size(), v)
}

struct Ig<'a> {
    trs: &'a Trs,
    g: BTreeSet<Sym>,
    budget: usize,
    memo: HashMap<Term, Term>,
    active: HashSet<Term>,
}

impl Ig<'_> {
    fn go(&mut self, t: &Term) -> Result<Term, RewriteError> {
        let Term::App(f, args) = t else { return Ok(t.clone()) };
        if let Some(v) = self.memo.get(t) {
            return Ok(v.clone());
        }
        if self.memo.len() >= self.budget {
            return Err(RewriteError::BudgetExceeded { budget: self.budget });
        }
        if !self.active.insert(t.clone()) {
            return Err(RewriteError::NonTerminating { term: t.to_string() });
        }
        let inner = Term::App(f.clone(), args.iter().map(|a| self.go(a)).collect::<Result<_, _>>()?);
        let out = if self.g.contains(f) {
            let mut images = Vec::new();
            for step in one_step_reducts(self.trs, t) {
                images.push(self.go(&step.target)?);
            }
            images.sort_by_key(order_key);
            images.dedup();
            let list = images
                .into_iter()
                .rev()
                .fold(Term::constant("nil"), |acc, u| Term::App(sym("cons"), vec![u, acc]));
            Term::App(sym("cons"), vec![inner, list])
        } else {
            inner
        };
        self.active.remove(t);
        self.memo.insert(t.clone(), out.clone());
        Ok(out)
    }
}

/// `I_G(t)` with `G` from [`ig_symbols`].
pub fn ig_transform(trs: &Trs, t: &Term, budget: usize) -> Result<IgImage, BoundsError> {
    let mut ig = Ig {
        trs,
        g: ig_symbols(trs),
        budget,
        memo: HashMap::new(),
        active: HashSet::new(),
    };
    let image = crate::rewrite::on_big_stack(|| ig.go(t))?;
    Ok(IgImage {
        size: image.size(),
        image,
    })
}

/// Exact `g(m, n)` for `m ≤ G_MAX_M`, `n ≤ G_MAX_N`.
pub fn g_bound(e: usize, m: usize, n: usize) -> Result<BigUint, BoundsError> {
    if m > G_MAX_M || n > G_MAX_N {
        return Err(BoundsError::ArgumentTooLarge {
            what: format!("g({m},{n})"),
        });
    }
    let mut memo = HashMap::new();
    Ok(g_rec(&BigUint::from(e), e, m, n, &mut memo))
}

fn g_rec(e: &BigUint, ev: usize, m: usize, n: usize, memo: &mut HashMap<(usize, usize), BigUint>) -> BigUint {
    if m == 0 {
        return e.clone();
    }
    if let Some(v) = memo.get(&(m, n)) {
        return v.clone();
    }
    let v = if n == 0 {
        e.pow(m as u32 + 1)
    } else {
        e * g_rec(e, ev, m - 1, n, memo) + e * BigUint::from(m) * g_rec(e, ev, ev * m, n - 1, memo)
    };
    memo.insert((m, n), v.clone());
    v
}

/// `g(min(m, G_MAX_M), min(n, G_MAX_N))`, a lower bound on `g(m, n)` by
/// monotonicity; the flag says whether it is exact.
pub fn g_lower(e: usize, m: usize, n: usize) -> (BigUint, bool) {
    let (m2, n2) = (m.min(G_MAX_M), n.min(G_MAX_N));
    let v = g_bound(e, m2, n2).expect("within range");
    (v, m2 == m && n2 == n)
}

/// `x ≤ base^exp` without expanding the power when bit lengths decide.
pub fn le_pow(x: &BigUint, base: &BigUint, exp: u64) -> bool {
    if exp == 0 || base.is_one() {
        return x <= &BigUint::one();
    }
    if base.is_zero() {
        return x.is_zero();
    }
    let k = base.bits() - 1;
    if k > 0 && x.bits() <= exp.saturating_mul(k) {
        return true;
    }
    let mut acc = BigUint::one();
    for _ in 0..exp {
        acc *= base;
        if &acc >= x {
            return true;
        }
    }
    false
}

/// `g(m, n) ≤ (E(n+1))^((n+1)·E^(2m+1))`
pub fn closed_form_holds(e: usize, m: usize, n: usize) -> Result<bool, BoundsError> {
    let g = g_bound(e, m, n)?;
    let exp = (e as u64)
        .checked_pow(2 * m as u32 + 1)
        .and_then(|p| p.checked_mul(n as u64 + 1))
        .ok_or_else(|| BoundsError::ArgumentTooLarge {
            what: format!("closed form at ({m},{n})"),
        })?;
    Ok(le_pow(&g, &BigUint::from(e * (n + 1)), exp))
}

fn two_pow(bits: u64, what: impl FnOnce() -> String) -> Result<BigUint, BoundsError> {
    if bits > MAX_BITS {
        return Err(BoundsError::ArgumentTooLarge { what: what() });
    }
    Ok(BigUint::one() << bits)
}

fn small(x: &BigUint) -> Option<u64> {
    u64::try_from(x).ok()
}

/// `h(m, n) = 2^(2^(m·2^(F(n+1))))`
pub fn h_bound(f: usize, m: &BigUint, n: &BigUint) -> Result<BigUint, BoundsError> {
    let what = || format!("h({m},{n})");
    let n = small(n).ok_or_else(|| BoundsError::ArgumentTooLarge { what: what() })?;
    let inner = two_pow((f as u64).saturating_mul(n + 1), what)?;
    let e = small(&(m * inner)).ok_or_else(|| BoundsError::ArgumentTooLarge { what: what() })?;
    let mid = two_pow(e, what)?;
    let mid = small(&mid).ok_or_else(|| BoundsError::ArgumentTooLarge { what: what() })?;
    two_pow(mid, what)
}

/// `G(m, n) = 2^(2^(d·(m+n+1)))`
pub fn big_g(d: usize, m: &BigUint, n: &BigUint) -> Result<BigUint, BoundsError> {
    let what = || format!("G({m},{n})");
    let e = small(&(BigUint::from(d) * (m + n + 1u32))).ok_or_else(|| BoundsError::ArgumentTooLarge { what: what() })?;
    let mid = small(&two_pow(e, what)?).ok_or_else(|| BoundsError::ArgumentTooLarge { what: what() })?;
    two_pow(mid, what)
}

/// `H[f](m) = f(1 + F·G(m, h(m, m)))` with `F = max{a, D}`.
pub fn big_h(
    f: impl Fn(&BigUint) -> Result<BigUint, BoundsError>,
    a: usize,
    big_d: usize,
    d: usize,
    m: &BigUint,
) -> Result<BigUint, BoundsError> {
    let ff = a.max(big_d);
    let h = h_bound(ff, m, m)?;
    f(&(BigUint::one() + BigUint::from(ff) * big_g(d, m, &h)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{derivation_height, DEFAULT_BUDGET};
    use crate::term::{parse_term, parse_trs};

    fn rebin() -> Trs {
        parse_trs("(VAR x y) (RULES d(0) -> 0 d(s(x)) -> s(s(d(x))) e(0,x) -> x e(s(x),y) -> e(x,d(y)))").unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(e_constant(&rebin()), 8);
        assert_eq!(ig_symbols(&rebin()).into_iter().collect::<Vec<_>>(), vec![sym("e")]);
    }

    #[test]
    fn ig_examples() {
        let r = rebin();
        let t = parse_term("d(0)", &[]).unwrap();
        assert_eq!(ig_transform(&r, &t, 1000).unwrap().image, t);
        let t = parse_term("e(0,0)", &[]).unwrap();
        let img = ig_transform(&r, &t, 1000).unwrap();
        assert_eq!(img.image.to_string(), "cons(e(0,0),cons(0,nil))");
        assert_eq!(img.size, 7);
        let dh = derivation_height(&r, &t, DEFAULT_BUDGET).unwrap();
        assert_eq!(dh, 1);
        assert!(BigUint::from(img.size) <= g_bound(8, 3, dh).unwrap());
    }

    #[test]
    fn g_values() {
        for e in [6usize, 8] {
            for n in 0..=2 {
                assert_eq!(g_bound(e, 0, n).unwrap(), BigUint::from(e));
            }
            for m in 0..=8 {
                assert_eq!(g_bound(e, m, 0).unwrap(), BigUint::from(e).pow(m as u32 + 1));
            }
        }
        let eight = BigUint::from(8u32);
        assert_eq!(g_bound(8, 1, 1).unwrap(), eight.pow(2) + eight.pow(10));
        assert!(closed_form_holds(8, 1, 1).unwrap());
        assert!(g_bound(8, 9, 0).is_err());
    }

    #[test]
    fn pow_comparison() {
        let b = BigUint::from(3u32);
        for x in 0u32..100 {
            for e in 0..5u64 {
                assert_eq!(le_pow(&BigUint::from(x), &b, e), BigUint::from(x) <= b.pow(e as u32), "{x} {e}");
            }
        }
    }

    #[test]
    fn towers() {
        let z = BigUint::zero();
        assert_eq!(h_bound(2, &z, &z).unwrap(), BigUint::from(2u32));
        assert_eq!(h_bound(2, &BigUint::one(), &z).unwrap(), BigUint::one() << 16u32);
        assert_eq!(big_g(1, &z, &z).unwrap(), BigUint::from(4u32));
        let v = big_h(|x| Ok(x.clone()), 2, 1, 1, &z).unwrap();
        // h(0,0) = 2, G(0,2) = 2^(2^3) = 256
        assert_eq!(v, BigUint::from(1u32 + 2 * 256));
        assert!(h_bound(2, &BigUint::from(5u32), &BigUint::from(5u32)).is_err());
    }
}
