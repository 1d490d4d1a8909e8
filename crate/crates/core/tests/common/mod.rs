//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qosroute::{load_topology, Graph, NodeId};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

/// Connected undirected graph on `n` nodes: a random spanning tree plus each
/// remaining edge with probability `extra`. Unit weights.
pub fn random_connected_graph(n: usize, extra: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(extra) {
                edges.insert((u, v));
            }
        }
    }
    let mut text = format!("nodes {n}\n");
    for (u, v) in edges {
        text.push_str(&format!("{u} {v} cap=1e6 prop=0.001 q=16 w=1\n"));
    }
    load_topology(&text).expect("generated topology parses")
}

/// Every loopless path from `s` to `t`, by depth-first enumeration.
pub fn all_loopless_paths(g: &Graph, s: NodeId, t: NodeId) -> Vec<Vec<NodeId>> {
    fn walk(g: &Graph, t: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let here = *path.last().expect("non-empty");
        if here == t {
            out.push(path.clone());
            return;
        }
        for l in g.outgoing(here) {
            let next = g.link(*l).to;
            if !path.contains(&next) {
                path.push(next);
                walk(g, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if s != t {
        walk(g, t, &mut vec![s], &mut out);
    }
    out
}
