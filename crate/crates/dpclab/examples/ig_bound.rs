//! The I_G image of a term against the g(m, n) size bound.

use dpclab::bounds::{e_constant, g_lower, ig_transform};
use dpclab::cli::corpus::builtin;
use dpclab::rewrite::derivation_height;
use dpclab::term::parse_term;

fn main() {
    let trs = builtin("Rebin", None).expect("builtin").trs;
    let e = e_constant(&trs);
    for s in ["d(s(0))", "e(s(0),s(0))", "e(s(s(0)),d(0))"] {
        let t = parse_term(s, &[]).expect("parses");
        let img = ig_transform(&trs, &t, 200_000).expect("within budget");
        let dh = derivation_height(&trs, &t, 200_000).expect("within budget");
        let (g, exact) = g_lower(e, t.size(), dh);
        let rel = if exact { "=" } else { ">=" };
        println!("{t}: dh = {dh}, |I_G| = {}, g({},{dh}) {rel} a {}-bit number", img.size, t.size(), g.bits());
    }
}
