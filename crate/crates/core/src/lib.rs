//! Parameterized solvers for Symmetric Directed Vertex Multicut.
//!
//! Given a digraph `D`, cut requests `(s, t)` and a budget `k`, find at most
//! `k` vertices whose deletion leaves every requested pair in different
//! strongly connected components. The crate provides
//!
//! * an exact branching algorithm whose running time is exponential in
//!   `k` and the number of requests ([`exact_kl`]),
//! * a 2-approximation exponential only in `k` ([`approx2`]),
//! * an exact algorithm for the multiway variant, where a terminal set must
//!   end up in pairwise distinct components ([`multiway`]),
//!
//! on top of a small toolbox for important vertex cuts ([`cuts`]) and a skew
//! multicut solver ([`skew`]). Everything is cross-checked against naive
//! reference solvers in [`oracle`].

pub mod approx2;
pub mod cuts;
pub mod digraph;
pub mod exact_kl;
pub mod harness;
pub mod multiway;
pub mod oracle;
pub mod search;
pub mod skew;

pub use digraph::{vset, ContractionMap, Digraph, GraphError, Vertex, VertexSet};
pub use exact_kl::MulticutInstance;
pub use search::{Interrupted, SearchCtx, SearchStats};
