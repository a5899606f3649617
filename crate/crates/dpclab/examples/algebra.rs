//! Checking an interpretation against pairs (strict) and usable rules with projections (weak).

use dpclab::bounds::{check_algebra, parse_algebra, AlgebraMode, Orientation};
use dpclab::cli::corpus::builtin;
use dpclab::dp::{dependency_pairs, usable_rules};

fn main() {
    let ex = builtin("Rebin", None).expect("builtin");
    let dp = dependency_pairs(&ex.trs);
    let weak = usable_rules(&dp).with_ce(&dp).rules().to_vec();
    let alg = parse_algebra(&ex.algebras[0].text).expect("parses");
    let report = check_algebra(&Orientation { strict: dp.pairs.clone(), weak }, &alg, AlgebraMode::Sampled { grid: 6 })
        .expect("evaluates");
    for i in &report.inequalities {
        println!("{:5} {}: {} {} {}", i.holds, i.label, i.lhs, i.rel, i.rhs);
    }
    println!("pass: {}", report.pass());
}
