//! The progenitor graph of a recorded derivation, printed as DOT.

use dpclab::cli::corpus::builtin;
use dpclab::progeny::progenitor_graph;
use dpclab::rewrite::parse_trace;

fn main() {
    let ex = builtin("Rd", None).expect("builtin");
    let (_, text) = ex.traces[0];
    let d = parse_trace(&ex.trs, text).expect("bundled trace replays");
    let g = progenitor_graph(&ex.trs, &d).expect("graph");
    println!("// {} nodes, height {}", g.nodes.len(), g.height());
    print!("{}", g.to_dot());
}
