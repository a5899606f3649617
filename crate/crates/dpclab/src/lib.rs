pub mod bounds;
pub mod cli;
pub mod dp;
pub mod progeny;
pub mod rewrite;
pub mod simtrs;
pub mod term;
