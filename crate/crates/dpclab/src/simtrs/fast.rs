//! The fast-growing family `F_0(m) = d^(m+1)`, `F_{n+1}(m) = F_n^(m+1)(m)`.
//!
//! Values below `2^MAX_BITS` are exact. Larger values are kept symbolically
//! as a stack of iterated applications `F_{i1}^{c1}(… F_{ik}^{ck}(b))` over an
//! exact base `b`, and compared by a sound but incomplete procedure that
//! only uses monotonicity and `F_n(x) > x`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::SimError;
use crate::progeny::PropertyCheck;

const MAX_BITS: u64 = 1 << 20;

/// A value of the family; `runs` is outermost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FastValue {
    runs: Vec<(usize, BigUint)>,
    base: BigUint,
}

impl FastValue {
    pub fn exact(n: impl Into<BigUint>) -> Self {
        FastValue {
            runs: Vec::new(),
            base: n.into(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        self.runs.is_empty().then_some(&self.base)
    }

    pub fn is_exact(&self) -> bool {
        self.runs.is_empty()
    }

    fn push(&mut self, n: usize, count: BigUint) {
        if count.is_zero() {
            return;
        }
        match self.runs.first_mut() {
            Some((m, c)) if *m == n => *c += count,
            _ => self.runs.insert(0, (n, count)),
        }
    }

    /// Removes `k` applications from the outermost run.
    fn strip(&self, k: &BigUint) -> FastValue {
        let mut v = self.clone();
        let c = &mut v.runs[0].1;
        *c -= k;
        if c.is_zero() {
            v.runs.remove(0);
        }
        v
    }

    fn total_count(&self) -> BigUint {
        self.runs.iter().map(|(_, c)| c).sum()
    }
}

impl std::fmt::Display for FastValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let small = |b: &BigUint| {
            if b.bits() <= 64 {
                b.to_string()
            } else {
                format!("<{} bits>", b.bits())
            }
        };
        for (n, c) in &self.runs {
            write!(f, "F{n}^{}(", small(c))?;
        }
        write!(f, "{}", small(&self.base))?;
        for _ in &self.runs {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// The family for one parameter `d ≥ 2`.
#[derive(Clone, Copy, Debug)]
pub struct Fast {
    d: u32,
}

impl Fast {
    pub fn new(d: u32) -> Result<Self, SimError> {
        if d < 2 {
            return Err(SimError::BadParams(format!("d = {d} < 2")));
        }
        Ok(Fast { d })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    fn limit() -> BigUint {
        BigUint::one() << MAX_BITS
    }

    /// `d^(x+1)` if below `2^MAX_BITS`.
    fn pow_exact(&self, x: &BigUint) -> Option<BigUint> {
        let e = x + 1u32;
        let floor_log = u64::from(31 - self.d.leading_zeros());
        if e.bits() > 32 || e.to_u64()? * floor_log >= MAX_BITS {
            return None;
        }
        let v = BigUint::from(self.d).pow(e.to_u32()?);
        (v.bits() <= MAX_BITS).then_some(v)
    }

    /// `F_n(v)`
    pub fn apply(&self, n: usize, v: &FastValue) -> FastValue {
        let mut out = v.clone();
        if !v.is_exact() {
            out.push(n, BigUint::one());
            return out;
        }
        if n == 0 {
            return match self.pow_exact(&v.base) {
                Some(e) => FastValue::exact(e),
                None => {
                    out.push(0, BigUint::one());
                    out
                }
            };
        }
        // F_n(x) = F_{n-1}^{x+1}(x)
        let mut left = &v.base + 1u32;
        while !left.is_zero() {
            if !out.is_exact() {
                out.push(n - 1, left);
                return out;
            }
            out = self.apply(n - 1, &out);
            left -= 1u32;
        }
        out
    }

    pub fn eval(&self, n: usize, m: u64) -> FastValue {
        self.apply(n, &FastValue::exact(m))
    }

    /// Sound comparison; `None` when undecided.
    pub fn cmp(&self, a: &FastValue, b: &FastValue) -> Option<Ordering> {
        match (a.is_exact(), b.is_exact()) {
            (true, true) => return Some(a.base.cmp(&b.base)),
            // every non-exact value is at least 2^MAX_BITS
            (false, true) => return Some(Ordering::Greater),
            (true, false) => return Some(Ordering::Less),
            _ => {}
        }
        let (i, p) = &a.runs[0];
        let (j, q) = &b.runs[0];
        match i.cmp(j) {
            Ordering::Equal => {
                let k = p.min(q);
                self.cmp(&a.strip(k), &b.strip(k))
            }
            Ordering::Greater => self.prove_gt(a, b).then_some(Ordering::Greater),
            Ordering::Less => self.prove_gt(b, a).then_some(Ordering::Less),
        }
    }

    /// `a > b` where the outermost index of `a` exceeds that of `b`:
    /// `F_i(a') = F_{i-1}^{a'+1}(a') > F_{i-1}^K(a')` for `K ≤ a'`.
    fn prove_gt(&self, a: &FastValue, b: &FastValue) -> bool {
        let i = a.runs[0].0;
        let inner = a.strip(&BigUint::one());
        if inner.is_exact() {
            // F_i of an exact argument is always unfolded
            return false;
        }
        let k = (b.total_count() + 1u32).min(Self::limit());
        let mut lower = inner;
        lower.push(i - 1, k);
        matches!(self.cmp(&lower, b), Some(Ordering::Greater | Ordering::Equal))
    }

    /// Decides `x ≥ c·y + e`; `None` when undecided.
    pub fn ge_affine(&self, x: &FastValue, c: u64, y: &FastValue, e: u64) -> Option<bool> {
        if c == 0 || y.is_exact() {
            let rhs = if c == 0 { BigUint::from(e) } else { &y.base * c + e };
            if let Some(xv) = x.as_exact() {
                return Some(*xv >= rhs);
            }
            return (rhs < Self::limit()).then_some(true);
        }
        if x.is_exact() {
            return Some(false);
        }
        if c == 1 && e == 0 {
            return self.cmp(x, y).map(|o| o != Ordering::Less);
        }
        // F_i(x') ≥ F_0(x') ≥ F_0(y) = d^(y+1) > c·y + e once y ≥ 2^MAX_BITS
        let inner = x.strip(&BigUint::one());
        match self.cmp(&inner, y)? {
            Ordering::Greater | Ordering::Equal => Some(true),
            Ordering::Less => None,
        }
    }
}

/// Exact `F_n(m)` for parameter `d`.
pub fn fast_function(d: u32, n: usize, m: u64) -> Result<BigUint, SimError> {
    let v = Fast::new(d)?.eval(n, m);
    v.as_exact().cloned().ok_or_else(|| SimError::ArgumentTooLarge {
        what: format!("F_{n}({m}) with d = {d}"),
    })
}

/// Monotonicity and domination properties of the family for all
/// `n ≤ n_max` and arguments `≤ m_max`. Undecided comparisons count as
/// violations.
pub fn fast_lemma_checks(d: u32, n_max: usize, m_max: u64) -> Result<Vec<PropertyCheck>, SimError> {
    let fast = Fast::new(d)?;
    let table: Vec<Vec<FastValue>> = (0..=n_max)
        .map(|n| (0..=2 * m_max + 1).map(|m| fast.eval(n, m)).collect())
        .collect();
    let f = |n: usize, m: u64| &table[n][m as usize];
    let mut inflate = PropertyCheck::new("fast_inflationary");
    let mut mono = PropertyCheck::new("fast_monotone");
    let mut level = PropertyCheck::new("fast_level_dominance");
    let mut additive = PropertyCheck::new("fast_additive");
    let undecided = |c: &mut PropertyCheck, what: String| c.violations.push(format!("undecided: {what}"));

    for n in 0..=n_max {
        for a in 0..=m_max {
            let pow = BigUint::from(d).pow(a as u32 + 1);
            inflate.checked += 1;
            match fast.ge_affine(f(n, a), 1, &FastValue::exact(pow.clone()), 0) {
                // d·a > a needs a ≥ 1; at a = 0 only F_n(0) > 0 remains
                Some(true) if pow >= BigUint::from(d) * a && (a == 0 || BigUint::from(d) * a > BigUint::from(a)) => {}
                Some(_) => inflate.violations.push(format!("F{n}({a}) ≥ d^(a+1) ≥ d·a > a")),
                None => undecided(&mut inflate, format!("F{n}({a}) vs d^(a+1)")),
            }
            for b in 0..a {
                mono.checked += 1;
                match fast.cmp(f(n, a), f(n, b)) {
                    Some(Ordering::Greater) => {}
                    Some(_) => mono.violations.push(format!("F{n}({a}) > F{n}({b})")),
                    None => undecided(&mut mono, format!("F{n}({a}) vs F{n}({b})")),
                }
            }
            if a >= 1 {
                for m in 0..n {
                    level.checked += 1;
                    match fast.cmp(f(n, a), f(m, a)) {
                        Some(Ordering::Greater) => {}
                        Some(_) => level.violations.push(format!("F{n}({a}) > F{m}({a})")),
                        None => undecided(&mut level, format!("F{n}({a}) vs F{m}({a})")),
                    }
                }
            }
            for b in 0..=m_max {
                additive.checked += 1;
                match fast.ge_affine(f(n, a + b), 1, f(n, a), b) {
                    Some(true) => {}
                    Some(false) => additive.violations.push(format!("F{n}({}) ≥ F{n}({a}) + {b}", a + b)),
                    None => undecided(&mut additive, format!("F{n}({}) vs F{n}({a}) + {b}", a + b)),
                }
            }
            if a >= 1 {
                additive.checked += 1;
                match fast.ge_affine(f(n, a + 1), 2, f(n, a), 0) {
                    Some(true) => {}
                    Some(false) => additive.violations.push(format!("F{n}({}) ≥ 2·F{n}({a})", a + 1)),
                    None => undecided(&mut additive, format!("F{n}({}) vs 2·F{n}({a})", a + 1)),
                }
            }
        }
    }
    Ok(vec![inflate, mono, level, additive])
}
