//! Shotgun assembly of random graphs: rebuilding a graph from the multiset of
//! its rooted `r`-balls, and constructing certified counterexamples when that
//! is impossible.

pub mod canon;
pub mod graph;
pub mod harness;
pub mod reconstruct;
pub mod witness;
