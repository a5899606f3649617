//! Derivation heights and empirical complexity tables for f(s(x)) -> s(f(f(x))), f(x) -> c(x,x).

use dpclab::cli::corpus::builtin;
use dpclab::rewrite::{derive, empirical_complexity, ComplexityMode, Strategy};
use dpclab::term::Term;

fn main() {
    let trs = builtin("Rde", None).expect("builtin").trs;
    let start = Term::app("f", vec![Term::iterate("s", 2, Term::constant("0"))]);
    let d = derive(&trs, &start, Strategy::LeftmostInnermost, 100);
    println!("innermost from {start}: {} steps to {}", d.len(), d.last());

    for mode in [ComplexityMode::Dc, ComplexityMode::DpComplexity] {
        let rows = empirical_complexity(&trs, 5, mode, 200_000).expect("within budget");
        let values: Vec<String> = rows.iter().map(|r| r.value.to_string()).collect();
        println!("{mode:?}: {}", values.join(" "));
    }
}
