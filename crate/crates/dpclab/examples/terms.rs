//! Parsing a system, walking positions and matching a left-hand side.

use dpclab::term::{match_term, parse_term, parse_trs};

fn main() {
    let trs = parse_trs("(VAR x) (RULES f(x) -> g(c,x) g(x,x) -> h(x,x) c -> d)").expect("parses");
    println!("{} rules, defined symbols {:?}", trs.len(), trs.defined());

    let t = parse_term("f(g(c,c))", &[]).expect("parses");
    for p in t.positions() {
        println!("{:>4}  {}", p.to_string(), t.get(&p).expect("own position"));
    }

    let lhs = &trs.rules()[1].lhs;
    let redex = t.get(&"1".parse().expect("position")).expect("exists");
    match match_term(lhs, redex) {
        Some(sigma) => println!("{lhs} matches {redex} with {sigma:?}"),
        None => println!("{lhs} does not match {redex}"),
    }
}
