use std::fmt;
use std::str::FromStr;

use super::TermError;

/// A path into a term; `Position::root()` is the empty sequence.
///
/// The derived order is lexicographic on the index sequence, so a prefix sorts
/// before its extensions and "leftmost" means "smallest".
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn from_indices(ix: impl Into<Vec<usize>>) -> Self {
        let v = ix.into();
        debug_assert!(v.iter().all(|&i| i >= 1), "argument indices are 1-based");
        Position(v)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `self · i`
    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    /// `self · q`
    pub fn concat(&self, q: &Position) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&q.0);
        Position(v)
    }

    /// `p ≤ q`: `self` is a (not necessarily proper) prefix of `q`.
    pub fn is_prefix_of(&self, q: &Position) -> bool {
        q.0.starts_with(&self.0)
    }

    /// `p < q`
    pub fn is_proper_prefix_of(&self, q: &Position) -> bool {
        self.0.len() < q.0.len() && self.is_prefix_of(q)
    }

    /// `p ∥ q`
    pub fn is_parallel(&self, q: &Position) -> bool {
        !self.is_prefix_of(q) && !q.is_prefix_of(self)
    }

    /// For `self = p·q` returns `q`.
    pub fn strip_prefix(&self, p: &Position) -> Option<Position> {
        self.0.strip_prefix(p.0.as_slice()).map(|s| Position(s.to_vec()))
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// All prefixes from the root up to and including `self`.
    pub fn prefixes(&self) -> Vec<Position> {
        (0..=self.0.len()).map(|k| Position(self.0[..k].to_vec())).collect()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for Position {
    type Err = TermError;

    /// Accepts the dot-joined form; `""` and `"ε"` denote the root.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Position::root());
        }
        let mut v = Vec::new();
        for part in s.split('.') {
            match part.parse::<usize>() {
                Ok(i) if i >= 1 => v.push(i),
                _ => {
                    return Err(TermError::Syntax {
                        line: 1,
                        col: 1,
                        msg: format!("bad position {s:?}"),
                    })
                }
            }
        }
        Ok(Position(v))
    }
}

impl serde::Serialize for Position {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn exactly_one_relation_holds() {
        let all = ["", "1", "2", "1.1", "1.2", "2.1", "1.1.1"];
        for a in all {
            for b in all {
                let (a, b) = (p(a), p(b));
                let n = [a.is_prefix_of(&b), b.is_proper_prefix_of(&a), a.is_parallel(&b)]
                    .iter()
                    .filter(|x| **x)
                    .count();
                assert_eq!(n, 1, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn lex_order_is_preorder() {
        let mut v = vec![p("2"), p("1.2"), p(""), p("1"), p("1.1")];
        v.sort();
        assert_eq!(v, vec![p(""), p("1"), p("1.1"), p("1.2"), p("2")]);
    }

    #[test]
    fn display_roundtrip() {
        assert_eq!(p("1.12.3").to_string(), "1.12.3");
        assert_eq!(Position::root().to_string(), "");
        assert!("0".parse::<Position>().is_err());
        assert_eq!(p("1.2").strip_prefix(&p("1")), Some(p("2")));
    }
}
