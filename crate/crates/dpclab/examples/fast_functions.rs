//! Values of the fast-growing family F_n and its growth properties.

use dpclab::simtrs::{fast_lemma_checks, Fast};

fn main() {
    let f = Fast::new(2).expect("d >= 2");
    for n in 0..=2 {
        let row: Vec<String> = (0..=3).map(|m| f.eval(n, m).to_string()).collect();
        println!("F_{n}(0..=3) = {}", row.join(", "));
    }
    for c in fast_lemma_checks(3, 2, 5).expect("valid d") {
        println!("{}: {} checked, {} violations", c.name, c.checked, c.violations.len());
    }
}
