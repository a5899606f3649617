//! Encoding terms with tr and simulating each step of a derivation in the generated system.

use dpclab::cli::corpus::builtin;
use dpclab::rewrite::parse_trace;
use dpclab::simtrs::{f_constant, SimContext, SimParams};

fn main() {
    let ex = builtin("Rb", None).expect("builtin");
    let d = parse_trace(&ex.trs, ex.traces[0].1).expect("bundled trace replays");
    let params = SimParams { a: 2, c: 2, k: 2, f_rules: f_constant(1) };
    let mut ctx = SimContext::new(&ex.trs, params, 200_000).expect("valid parameters");
    println!("generated system has {} rules", ctx.sim_trs().len());
    for (i, s) in d.steps.iter().enumerate() {
        let w = ctx.simulate_step(i, s).expect("simulates");
        println!("step {}: {} -> {}", i + 1, s.source, s.target);
        println!("  {} simulating steps from {}", w.len(), w.initial);
    }
}
