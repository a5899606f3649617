//! Dependency pairs, the estimated graph with its SCCs, and usable rules.

use dpclab::cli::corpus::builtin;
use dpclab::dp::{dependency_pairs, estimated_dependency_graph, usable_rules};

fn main() {
    for name in ["Ra", "Rb", "Rebin"] {
        let trs = builtin(name, None).expect("builtin").trs;
        let dp = dependency_pairs(&trs);
        let g = estimated_dependency_graph(&dp);
        println!("{name}: {} pairs, {} edges, {} SCCs", dp.pairs.len(), g.edges.len(), g.sccs.len());
        for (i, p) in dp.pairs.iter().enumerate() {
            println!("  {}: {p}  (rank {})", i + 1, g.pair_rank(i));
        }
        let u = usable_rules(&dp);
        for &i in &u.usable {
            println!("  usable: {}", trs.rules()[i]);
        }
    }
}
