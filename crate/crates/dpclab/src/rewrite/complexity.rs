//! Empirical complexity tables: maxima of heights over all ground terms up to
//! a given size.

use serde::Serialize;

use super::{HeightCache, RelativeCache, RewriteError};
use crate::dp::{dependency_pairs, estimated_dependency_graph, sharp};
use crate::term::{GroundEnumerator, Term, Trs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexityMode {
    /// `dh(t, →R)`
    Dc,
    /// `dh(t♯, →DP(R)/R)`
    DpComplexity,
    /// `max_i dh(t♯, →P_i/R)` over all SCCs, at least 1
    SccComplexity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityRow {
    pub size: usize,
    pub value: usize,
    /// A term of size at most `size` attaining `value`.
    pub witness: Option<Term>,
}

/// One row per `m` in `1..=n`, each the maximum over ground terms of size
/// at most `m` (so the values are monotone in `m`).
pub fn empirical_complexity(
    trs: &Trs,
    n: usize,
    mode: ComplexityMode,
    budget: usize,
) -> Result<Vec<ComplexityRow>, RewriteError> {
    let mut measure: Box<dyn FnMut(&Term) -> Result<usize, RewriteError>> = match mode {
        ComplexityMode::Dc => {
            let mut cache = HeightCache::new(trs, budget);
            Box::new(move |t| cache.dh(t))
        }
        ComplexityMode::DpComplexity => {
            let dp = dependency_pairs(trs);
            let mut cache = RelativeCache::new(&dp.pairs_trs(), trs, budget);
            let base = trs.clone();
            Box::new(move |t| cache.dh(&sharp(&base, t)))
        }
        ComplexityMode::SccComplexity => {
            let dp = dependency_pairs(trs);
            let g = estimated_dependency_graph(&dp);
            let mut caches: Vec<RelativeCache> = g
                .sccs
                .iter()
                .map(|c| RelativeCache::new(&dp.subset(&c.members), trs, budget))
                .collect();
            let base = trs.clone();
            Box::new(move |t| {
                let u = sharp(&base, t);
                let mut best = 1;
                for c in caches.iter_mut() {
                    best = best.max(c.dh(&u)?);
                }
                Ok(best)
            })
        }
    };
    let mut en = GroundEnumerator::new(trs.signature());
    let mut rows = Vec::with_capacity(n);
    let mut best: Option<(usize, Term)> = None;
    for m in 1..=n {
        for t in en.of_size(m) {
            let v = measure(&t)?;
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, t));
            }
        }
        rows.push(ComplexityRow {
            size: m,
            value: best.as_ref().map_or(0, |b| b.0),
            witness: best.as_ref().map(|b| b.1.clone()),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::DEFAULT_BUDGET;
    use crate::term::{parse_trs, sym};

    fn rde() -> Trs {
        let t = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))) f(x) -> c(x,x))").unwrap();
        Trs::with_symbols(t.rules().to_vec(), [(sym("0"), 0)]).unwrap()
    }

    #[test]
    fn rde_dc() {
        let rows = empirical_complexity(&rde(), 4, ComplexityMode::Dc, DEFAULT_BUDGET).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[3].value >= 18);
        assert!(rows.windows(2).all(|w| w[0].value <= w[1].value));
        assert!(empirical_complexity(&rde(), 0, ComplexityMode::Dc, 10).unwrap().is_empty());
    }

    #[test]
    fn rde_dp_linear() {
        let rows = empirical_complexity(&rde(), 6, ComplexityMode::DpComplexity, DEFAULT_BUDGET).unwrap();
        for r in &rows {
            assert!(r.value <= r.size, "{r:?}");
        }
        let scc = empirical_complexity(&rde(), 4, ComplexityMode::SccComplexity, DEFAULT_BUDGET).unwrap();
        assert!(scc.iter().all(|r| r.value >= 1));
    }
}
