//! Candidate path selection: the K cheapest loopless paths per pair.
//!
//! Yen's deviation search over a Dijkstra subroutine. Equal-cost paths are
//! ordered lexicographically by node sequence; the subroutine returns the
//! lexicographically smallest among equal-cost spur paths so the tie-break
//! holds across the whole candidate set (exact for positive link costs).
//!
//! The search runs on the additive part of the static cost. When the
//! coefficients also weight multiplicative or min-max metrics the candidates
//! are still ranked by the full static cost, but the set is no longer
//! guaranteed to be the K best.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::topology::{static_cost, CostCoefficients, Graph, LinkId, NodeId, TopologyError};

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("K must be at least 1")]
    ZeroK,
    #[error("source and destination are both {0}")]
    SameEndpoints(NodeId),
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("path visits node {0} twice")]
    Loop(NodeId),
    #[error("path is empty")]
    Empty,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// A loopless node sequence with its cached static cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    nodes: Vec<NodeId>,
    static_cost: f64,
}

impl Path {
    pub fn new(
        graph: &Graph,
        nodes: Vec<NodeId>,
        coefficients: &CostCoefficients,
    ) -> Result<Self, PathError> {
        if nodes.is_empty() {
            return Err(PathError::Empty);
        }
        let mut seen = HashSet::with_capacity(nodes.len());
        for n in &nodes {
            if n.0 >= graph.node_count() {
                return Err(PathError::UnknownNode(*n));
            }
            if !seen.insert(*n) {
                return Err(PathError::Loop(*n));
            }
        }
        let static_cost = static_cost(graph, &nodes, coefficients)?;
        Ok(Path { nodes, static_cost })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn static_cost(&self) -> f64 {
        self.static_cost
    }

    pub fn hops(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.nodes.last().expect("paths are never empty")
    }

    pub fn links<'g>(&'g self, graph: &'g Graph) -> impl Iterator<Item = LinkId> + 'g {
        self.nodes.windows(2).map(move |w| {
            graph
                .link_between(w[0], w[1])
                .expect("path edges are checked at construction")
        })
    }

    fn cmp_rank(&self, other: &Path) -> Ordering {
        self.static_cost
            .total_cmp(&other.static_cost)
            .then_with(|| self.nodes.cmp(&other.nodes))
    }
}

/// Up to K candidate paths for one ordered pair, cheapest first.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub source: NodeId,
    pub destination: NodeId,
    pub paths: Vec<Path>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn route(pred: &[Option<NodeId>], source: NodeId, mut node: NodeId) -> Vec<NodeId> {
    let mut out = vec![node];
    while node != source {
        node = pred[node.0].expect("settled nodes have a predecessor");
        out.push(node);
    }
    out.reverse();
    out
}

/// Distance from every node to `target`, by a Dijkstra over reversed links.
/// Infinite for nodes that cannot reach it.
fn distances_to(graph: &Graph, edge_cost: &[f64], incoming: &[Vec<LinkId>], target: NodeId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    let mut heap = BinaryHeap::new();
    dist[target.0] = 0.0;
    heap.push(Reverse((Dist(0.0), target)));
    while let Some(Reverse((Dist(d), v))) = heap.pop() {
        if d > dist[v.0] {
            continue;
        }
        for &lid in &incoming[v.0] {
            let u = graph.link(lid).from;
            let candidate = d + edge_cost[lid.0];
            if candidate < dist[u.0] {
                dist[u.0] = candidate;
                heap.push(Reverse((Dist(candidate), u)));
            }
        }
    }
    dist
}

fn incoming_links(graph: &Graph) -> Vec<Vec<LinkId>> {
    let mut incoming = vec![Vec::new(); graph.node_count()];
    for (i, l) in graph.links().iter().enumerate() {
        incoming[l.to.0].push(LinkId(i));
    }
    incoming
}

/// Best-first search returning the lexicographically smallest among the
/// cheapest source→target routes that avoid the banned nodes and links.
///
/// `to_target` is a consistent lower bound on the remaining cost (zero for
/// plain Dijkstra, exact distances in the unrestricted graph for the spur
/// searches). The heap orders by estimated total, then by cost so far, so
/// every equal-cost predecessor of a node settles before the node does.
fn lex_search(
    graph: &Graph,
    edge_cost: &[f64],
    source: NodeId,
    target: NodeId,
    banned_nodes: &[bool],
    banned_links: &HashSet<LinkId>,
    to_target: Option<&[f64]>,
) -> Option<Vec<NodeId>> {
    let n = graph.node_count();
    let h = |v: NodeId| to_target.map_or(0.0, |h| h[v.0]);
    if h(source).is_infinite() {
        return None;
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<NodeId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source.0] = 0.0;
    heap.push(Reverse((Dist(h(source)), Dist(0.0), source)));

    while let Some(Reverse((_, Dist(d), u))) = heap.pop() {
        if done[u.0] || d > dist[u.0] {
            continue;
        }
        done[u.0] = true;
        if u == target {
            break;
        }
        for &lid in graph.outgoing(u) {
            if banned_links.contains(&lid) {
                continue;
            }
            let v = graph.link(lid).to;
            if banned_nodes[v.0] || done[v.0] || h(v).is_infinite() {
                continue;
            }
            let candidate = d + edge_cost[lid.0];
            let better = match candidate.total_cmp(&dist[v.0]) {
                Ordering::Less => true,
                Ordering::Equal => {
                    let current = pred[v.0].expect("finite distance has a predecessor");
                    current != u && route(&pred, source, u) < route(&pred, source, current)
                }
                Ordering::Greater => false,
            };
            if better {
                dist[v.0] = candidate;
                pred[v.0] = Some(u);
                heap.push(Reverse((Dist(candidate + h(v)), Dist(candidate), v)));
            }
        }
    }
    done[target.0].then(|| route(&pred, source, target))
}

fn edge_costs(graph: &Graph, coefficients: &CostCoefficients) -> Vec<f64> {
    (0..graph.link_count())
        .map(|i| graph.additive_edge_cost(LinkId(i), coefficients))
        .collect()
}

fn check_request(graph: &Graph, s: NodeId, t: NodeId, coefficients: &CostCoefficients) -> Result<(), PathError> {
    for n in [s, t] {
        if n.0 >= graph.node_count() {
            return Err(PathError::UnknownNode(n));
        }
    }
    if s == t {
        return Err(PathError::SameEndpoints(s));
    }
    if coefficients.values().len() != graph.metric_kinds().len() {
        return Err(TopologyError::CoefficientMismatch {
            expected: graph.metric_kinds().len(),
            got: coefficients.values().len(),
        }
        .into());
    }
    Ok(())
}

/// Cheapest s→t path under the additive static cost, lexicographic
/// tie-break. `None` when t is unreachable.
pub fn shortest_path(
    graph: &Graph,
    s: NodeId,
    t: NodeId,
    coefficients: &CostCoefficients,
) -> Result<Option<Path>, PathError> {
    check_request(graph, s, t, coefficients)?;
    let costs = edge_costs(graph, coefficients);
    let banned = vec![false; graph.node_count()];
    lex_search(graph, &costs, s, t, &banned, &HashSet::new(), None)
        .map(|nodes| Path::new(graph, nodes, coefficients))
        .transpose()
}

/// A pooled candidate with the index its spur left the parent path at.
struct Ranked(Path, usize);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_rank(&other.0)
    }
}

/// The K cheapest loopless s→t paths. An unreachable destination yields an
/// empty set.
pub fn k_shortest_paths(
    graph: &Graph,
    s: NodeId,
    t: NodeId,
    k: usize,
    coefficients: &CostCoefficients,
) -> Result<CandidateSet, PathError> {
    if k == 0 {
        return Err(PathError::ZeroK);
    }
    check_request(graph, s, t, coefficients)?;
    let costs = edge_costs(graph, coefficients);
    let to_target = (k > 1).then(|| distances_to(graph, &costs, &incoming_links(graph), t));
    Ok(yen(graph, &costs, to_target.as_deref(), s, t, k, coefficients))
}

/// Yen's search. `to_target` holds the unrestricted distances to `t` and
/// steers the spur searches; it is only consulted when `k > 1`.
fn yen(
    graph: &Graph,
    costs: &[f64],
    to_target: Option<&[f64]>,
    s: NodeId,
    t: NodeId,
    k: usize,
    coefficients: &CostCoefficients,
) -> CandidateSet {
    let mut result = CandidateSet {
        source: s,
        destination: t,
        paths: Vec::with_capacity(k),
    };
    let n = graph.node_count();
    let no_links = HashSet::new();
    let Some(first) = lex_search(graph, costs, s, t, &vec![false; n], &no_links, None) else {
        return result;
    };
    let make = |nodes: Vec<NodeId>| Path::new(graph, nodes, coefficients).expect("search yields valid paths");
    let mut seen: HashSet<Vec<NodeId>> = HashSet::new();
    seen.insert(first.clone());
    result.paths.push(make(first));
    let mut pool: BTreeSet<Ranked> = BTreeSet::new();
    // Spurs taken before the newest path's deviation point repeat searches
    // already made for its parent (Lawler's refinement).
    let mut deviation = 0;

    while result.paths.len() < k {
        let last = result.paths.last().expect("non-empty").nodes.clone();
        let mut banned_nodes = vec![false; n];
        for node in &last[..deviation] {
            banned_nodes[node.0] = true;
        }
        for i in deviation..last.len() - 1 {
            let spur = last[i];
            let root = &last[..=i];
            let banned_links: HashSet<LinkId> = result
                .paths
                .iter()
                .filter(|p| p.nodes.len() > i + 1 && &p.nodes[..=i] == root)
                .filter_map(|p| graph.link_between(p.nodes[i], p.nodes[i + 1]))
                .collect();
            if let Some(spur_route) = lex_search(graph, costs, spur, t, &banned_nodes, &banned_links, to_target) {
                let mut total = root[..i].to_vec();
                total.extend(spur_route);
                if seen.insert(total.clone()) {
                    pool.insert(Ranked(make(total), i));
                }
            }
            banned_nodes[spur.0] = true;
        }
        match pool.pop_first() {
            Some(Ranked(next, at)) => {
                result.paths.push(next);
                deviation = at;
            }
            None => break,
        }
    }
    result
}

/// Candidate sets for every ordered pair, indexed densely by `(s, t)`.
#[derive(Debug, Clone)]
pub struct CandidateTable {
    node_count: usize,
    k: usize,
    sets: Vec<CandidateSet>,
}

impl CandidateTable {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pair_index(&self, s: NodeId, t: NodeId) -> usize {
        s.0 * self.node_count + t.0
    }

    pub fn get(&self, s: NodeId, t: NodeId) -> Option<&CandidateSet> {
        if s == t || s.0 >= self.node_count || t.0 >= self.node_count {
            return None;
        }
        Some(&self.sets[self.pair_index(s, t)])
    }

    pub fn by_index(&self, pair: usize) -> &CandidateSet {
        &self.sets[pair]
    }

    /// Sets for the ordered pairs with s ≠ t.
    pub fn iter(&self) -> impl Iterator<Item = &CandidateSet> {
        self.sets.iter().filter(|c| c.source != c.destination)
    }

    /// Number of ordered pairs with s ≠ t.
    pub fn len(&self) -> usize {
        self.node_count * self.node_count.saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Candidate sets for all ordered pairs. Pairs are searched in parallel and
/// assembled in index order.
pub fn all_pairs_candidates(
    graph: &Graph,
    k: usize,
    coefficients: &CostCoefficients,
) -> Result<CandidateTable, PathError> {
    if k == 0 {
        return Err(PathError::ZeroK);
    }
    if coefficients.values().len() != graph.metric_kinds().len() {
        return Err(TopologyError::CoefficientMismatch {
            expected: graph.metric_kinds().len(),
            got: coefficients.values().len(),
        }
        .into());
    }
    let n = graph.node_count();
    let costs = edge_costs(graph, coefficients);
    let incoming = incoming_links(graph);
    let to_target: Vec<Vec<f64>> = if k > 1 {
        (0..n)
            .into_par_iter()
            .map(|t| distances_to(graph, &costs, &incoming, NodeId(t)))
            .collect()
    } else {
        Vec::new()
    };
    let sets = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (s, t) = (NodeId(i / n), NodeId(i % n));
            if s == t {
                CandidateSet {
                    source: s,
                    destination: t,
                    paths: Vec::new(),
                }
            } else {
                yen(graph, &costs, to_target.get(t.0).map(Vec::as_slice), s, t, k, coefficients)
            }
        })
        .collect();
    Ok(CandidateTable {
        node_count: n,
        k,
        sets,
    })
}
