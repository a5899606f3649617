//! Bundled example systems, their traces, filterings and algebras.

use crate::bounds::AlgebraMode;
use crate::term::{parse_trs, sym, Term, Trs};

/// Which rules an algebra has to orient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// `DP(R)` strictly, `R` weakly.
    PairsOverRules,
    /// `DP(R)` strictly, `U(DP(R)) ∪ Ce` weakly.
    PairsOverUsable,
    /// `R` strictly.
    Rules,
    /// `R` strictly, with `Dc(m) ≤ p^m(0)` checked up to the given size.
    DcBound { p: String, n: usize },
}

#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub text: String,
    pub target: Target,
    pub mode: AlgebraMode,
}

#[derive(Clone, Debug)]
pub struct Example {
    pub name: String,
    pub trs: Trs,
    /// `(file name, contents)`
    pub traces: Vec<(&'static str, &'static str)>,
    /// Default argument filtering in `--filter` syntax.
    pub filter: Option<&'static str>,
    pub algebras: Vec<AlgebraSpec>,
}

pub const NAMES: [&str; 9] = ["Ra", "Rb", "Rnonll", "Rd", "Re", "Rde", "Rebin", "Rl", "Rack"];

/// Default `l` for `Rl`.
pub const DEFAULT_L: usize = 2;

const RB: &str = include_str!("../../traces/fig1.trace");
const RD: &str = include_str!("../../traces/rd.trace");
const RE: &str = include_str!("../../traces/re.trace");
const RDE1: &str = include_str!("../../traces/rde_n1.trace");
const RDE2: &str = include_str!("../../traces/rde_n2.trace");
const RDE3: &str = include_str!("../../traces/rde_n3.trace");
const RA: &str = include_str!("../../traces/ra.trace");
const NONLL: &str = include_str!("../../traces/nonll.trace");
const EBIN: &str = include_str!("../../traces/ebin.trace");
const RL2: &str = include_str!("../../traces/rl2_t00.trace");
const ACK: &str = include_str!("../../traces/ack.trace");

const RDE_ALGEBRA: &str = "f#(m) = m\nf(m) = m\ns(m) = m + 1\nc(m,n) = 0\n0 = 0\n";
const REBIN_ALGEBRA: &str = "e#(m,n) = 2^m*(n+1)+1\nd#(m) = m\nd(m) = 2*m\ns(m) = m+1\n0 = 0\nc_e#cons(m,n) = m+n\n";

fn with_constants(text: &str, constants: &[&str]) -> Trs {
    let trs = parse_trs(text).expect("builtin systems parse");
    Trs::with_symbols(trs.rules().to_vec(), constants.iter().map(|c| (sym(c), 0))).expect("builtin systems are well formed")
}

/// Rules of `R(l)`: `∘m` for `2 ≤ m ≤ l` and the three-level rule for `3 ≤ m ≤ l`.
pub fn rl_text(l: usize) -> String {
    let mut s = String::from("(VAR x y z w)\n(RULES\n");
    for m in 2..=l {
        s.push_str(&format!("  ∘{m}(i(x),∘{}(y,z)) -> ∘{m}(x,∘{}(i(i(y)),z))\n", m - 1, m - 1));
    }
    for m in 3..=l {
        let (a, b) = (m - 1, m - 2);
        s.push_str(&format!("  ∘{m}(i(x),∘{a}(y,∘{b}(z,w))) -> ∘{m}(x,∘{a}(z,∘{b}(y,w)))\n"));
    }
    s.push_str(")\n");
    s
}

/// `t_{m,n} = i^(2(n+1))(e) ∘_{m+2} (e ∘_{m+1} (… (e ∘_1 e)…))`
pub fn rl_start(m: usize, n: usize) -> Term {
    let e = Term::constant("e");
    let mut right = e.clone();
    for k in 1..=m + 1 {
        right = Term::app(&format!("∘{k}"), vec![e.clone(), right]);
    }
    Term::app(&format!("∘{}", m + 2), vec![Term::iterate("i", 2 * (n + 1), e), right])
}

/// `None` for an unknown name or `Rl` with `l < 2`.
pub fn builtin(name: &str, param: Option<usize>) -> Option<Example> {
    let ex = |name: &str, trs, traces, filter, algebras| Example {
        name: name.to_string(),
        trs,
        traces,
        filter,
        algebras,
    };
    Some(match name {
        "Ra" => ex(
            "Ra",
            with_constants(
                "(VAR x y z w) (RULES
                   ∘(i(x),∘(y,z)) -> ∘(f(x,i(x)),∘(i(i(y)),z))
                   ∘(i(x),∘(y,∘(z,w))) -> ∘(f(x,i(x)),∘(z,∘(y,w)))
                   i(x) -> x
                   f(x,y) -> x)",
                &["e"],
            ),
            vec![("ra.trace", RA)],
            Some("f=1 f#=1 i#=1 i=[1] ∘=[1,2] ∘#=[1,2] e=[]"),
            vec![],
        ),
        "Rb" => ex(
            "Rb",
            parse_trs("(VAR x) (RULES f(x) -> g(c,x) g(x,x) -> h(x,x) c -> d)").expect("builtin"),
            vec![("fig1.trace", RB)],
            None,
            vec![],
        ),
        "Rnonll" => ex(
            "Rnonll",
            with_constants("(VAR x) (RULES f(x,x) -> g(x))", &["0"]),
            vec![("nonll.trace", NONLL)],
            None,
            vec![],
        ),
        "Rd" => ex(
            "Rd",
            with_constants("(VAR x) (RULES f(s(x)) -> s(f(f(x))))", &["0"]),
            vec![("rd.trace", RD)],
            None,
            vec![],
        ),
        "Re" => ex(
            "Re",
            with_constants("(VAR x) (RULES d(s(x)) -> s(s(d(x))))", &["0"]),
            vec![("re.trace", RE)],
            None,
            vec![AlgebraSpec {
                text: "s(n) = n+1\nd(n) = 3*n+2\n0 = 0\n".into(),
                target: Target::DcBound { p: "3*n+2".into(), n: 5 },
                mode: AlgebraMode::LinearExact,
            }],
        ),
        "Rde" => ex(
            "Rde",
            with_constants("(VAR x) (RULES f(s(x)) -> s(f(f(x))) f(x) -> c(x,x))", &["0"]),
            vec![("rde_n1.trace", RDE1), ("rde_n2.trace", RDE2), ("rde_n3.trace", RDE3)],
            None,
            vec![AlgebraSpec {
                text: RDE_ALGEBRA.into(),
                target: Target::PairsOverRules,
                mode: AlgebraMode::LinearExact,
            }],
        ),
        "Rebin" => ex(
            "Rebin",
            parse_trs("(VAR x y) (RULES d(0) -> 0 d(s(x)) -> s(s(d(x))) e(0,x) -> x e(s(x),y) -> e(x,d(y)))")
                .expect("builtin"),
            vec![("ebin.trace", EBIN)],
            None,
            vec![AlgebraSpec {
                text: REBIN_ALGEBRA.into(),
                target: Target::PairsOverUsable,
                mode: AlgebraMode::Sampled { grid: 6 },
            }],
        ),
        "Rl" => {
            let l = param.unwrap_or(DEFAULT_L);
            if l < 2 {
                return None;
            }
            let traces = if l == 2 { vec![("rl2_t00.trace", RL2)] } else { vec![] };
            ex("Rl", with_constants(&rl_text(l), &["e"]), traces, None, vec![])
        }
        "Rack" => ex(
            "Rack",
            with_constants(
                "(VAR x y z w) (RULES
                   ∘(i(x),∘(y,z)) -> ∘(x,∘(i(i(y)),z))
                   ∘(i(x),∘(y,∘(z,w))) -> ∘(x,∘(z,∘(y,w))))",
                &["e"],
            ),
            vec![("ack.trace", ACK)],
            None,
            vec![],
        ),
        _ => return None,
    })
}

/// Every builtin with default parameters, in [`NAMES`] order.
pub fn builtin_examples() -> Vec<Example> {
    NAMES.iter().map(|n| builtin(n, None).expect("known name")).collect()
}

/// A bundled trace by file name, searched across all builtins.
pub fn bundled_trace(file_name: &str) -> Option<(String, &'static str)> {
    builtin_examples()
        .into_iter()
        .find_map(|e| e.traces.iter().find(|(n, _)| *n == file_name).map(|(_, t)| (e.name.clone(), *t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_trace;

    #[test]
    fn rule_counts() {
        let counts: Vec<usize> = builtin_examples().iter().map(|e| e.trs.len()).collect();
        assert_eq!(counts, [4, 3, 1, 1, 1, 2, 4, 1, 2]);
        assert_eq!(builtin("Rl", Some(3)).unwrap().trs.len(), 3);
        assert!(builtin("Rl", Some(1)).is_none());
        assert!(builtin("nope", None).is_none());
    }

    #[test]
    fn traces_replay() {
        for e in builtin_examples() {
            for (name, text) in &e.traces {
                parse_trace(&e.trs, text).unwrap_or_else(|err| panic!("{}/{name}: {err}", e.name));
            }
        }
    }

    #[test]
    fn ackermann_start() {
        assert_eq!(rl_start(0, 0).to_string(), "∘2(i(i(e)),∘1(e,e))");
        assert_eq!(rl_start(1, 0).to_string(), "∘3(i(i(e)),∘2(e,∘1(e,e)))");
    }
}
