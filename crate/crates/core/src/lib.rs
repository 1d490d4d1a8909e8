//! Adaptive multipath QoS routing.
//!
//! Routing happens in two stages. [`kpaths`] preselects the K cheapest
//! loopless paths of every source-destination pair under a static cost
//! ([`topology::static_cost`]); [`policy`] then splits traffic over those
//! candidates, either statically (SPF, SOMR) or from delay estimates learned
//! through acknowledgements (KSPQR, KOQRA). [`sim`] is the packet-level
//! simulator used to compare the policies and [`scenario`] drives batches of
//! runs and writes their results.

pub mod kpaths;
pub mod policy;
pub mod scenario;
pub mod sim;
pub mod topology;

pub use kpaths::{all_pairs_candidates, k_shortest_paths, CandidateSet, CandidateTable, Path, PathError};
pub use policy::{PolicyKind, PolicyParams, PolicyState};
pub use topology::{load_topology, static_cost, validate_graph, CostCoefficients, Graph, NodeId};

/// The bundled 57-node backbone topology.
pub const NTTNET_TOPOLOGY: &str = include_str!("../data/nttnet.topo");
