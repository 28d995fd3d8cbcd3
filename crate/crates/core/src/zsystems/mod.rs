//! Single-map dynamics: chain recurrence, compressible sets and orbit recurrence.

pub mod compress;
pub mod graph;
pub mod recurrence;

pub use compress::{find_compressible_clopen, Atom, ClopenSet};
pub use graph::{build_eps_graph, build_eps_graph_on, chain_recurrent_set, model_from_chains, model_from_chains_on, EpsGraph};
pub use recurrence::{recurrence_scan, Recurrence};
