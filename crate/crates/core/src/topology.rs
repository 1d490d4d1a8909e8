//! Network graph, topology file format and the static path cost.
//!
//! A topology file is line oriented:
//!
//! ```text
//! # comment
//! nodes 3
//! metrics additive,min-max        # optional, defaults to all additive
//! 0 1 cap=1e6 prop=0.001 q=50 w=1,1e6
//! 1 2 cap=1e6 prop=0.002 q=50 w=2,2e6
//! ```
//!
//! Every physical link line expands into two directed links with identical
//! parameters.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub usize);

/// How a per-link metric composes along a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    /// Summed along the path (delay, hop cost).
    Additive,
    /// Multiplied along the path.
    Multiplicative,
    /// Bottleneck value: the minimum along the path (bandwidth). Enters the
    /// cost through its reciprocal, so a wider bottleneck is cheaper.
    MinMax,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Additive => "additive",
            MetricKind::Multiplicative => "multiplicative",
            MetricKind::MinMax => "min-max",
        }
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "additive" => Ok(MetricKind::Additive),
            "multiplicative" => Ok(MetricKind::Multiplicative),
            "min-max" | "minmax" => Ok(MetricKind::MinMax),
            other => Err(format!("unknown metric kind `{other}`")),
        }
    }
}

/// Per-link QoS weights, one component per metric of the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn unit() -> Self {
        WeightVector(vec![1.0])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A directed link.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    /// Bits per second.
    pub capacity: f64,
    /// Seconds.
    pub propagation_delay: f64,
    /// Packets, including the one being transmitted.
    pub queue_capacity: usize,
    pub weights: WeightVector,
}

impl Link {
    fn same_parameters(&self, other: &Link) -> bool {
        self.capacity == other.capacity
            && self.propagation_delay == other.propagation_delay
            && self.queue_capacity == other.queue_capacity
            && self.weights == other.weights
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate link {from}-{to}")]
    DuplicateLink { line: usize, from: NodeId, to: NodeId },
    #[error("line {line}: link {from}-{to} references a node outside 0..{node_count}")]
    DanglingNode {
        line: usize,
        from: NodeId,
        to: NodeId,
        node_count: usize,
    },
    #[error("line {line}: capacity must be positive, got {capacity}")]
    NonPositiveCapacity { line: usize, capacity: f64 },
    #[error("missing `nodes <N>` header")]
    MissingHeader,
    #[error("no link {from}->{to} in graph")]
    MissingLink { from: NodeId, to: NodeId },
    #[error("expected {expected} cost coefficients, got {got}")]
    CoefficientMismatch { expected: usize, got: usize },
    #[error("path cost is not finite")]
    NonFiniteCost,
    #[error("link {from}->{to} has no reverse twin with identical parameters")]
    NotSymmetric { from: NodeId, to: NodeId },
}

/// Weights of the linear combination applied to the per-metric path
/// aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct CostCoefficients(Vec<f64>);

impl CostCoefficients {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, String> {
        if coefficients.is_empty() {
            return Err("at least one cost coefficient is required".into());
        }
        if coefficients.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err("cost coefficients must be finite and non-negative".into());
        }
        if !coefficients.iter().any(|c| *c > 0.0) {
            return Err("at least one cost coefficient must be positive".into());
        }
        Ok(CostCoefficients(coefficients))
    }

    /// Single metric, coefficient 1: with unit link weights the cost of a
    /// path is its hop count.
    pub fn unit() -> Self {
        CostCoefficients(vec![1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for CostCoefficients {
    fn default() -> Self {
        Self::unit()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    metric_kinds: Vec<MetricKind>,
    links: Vec<Link>,
    adjacency: Vec<Vec<LinkId>>,
    index: HashMap<(NodeId, NodeId), LinkId>,
}

impl Graph {
    /// Builds a graph without checking link invariants; use
    /// [`validate_graph`] to inspect the result. Links whose endpoints fall
    /// outside `0..node_count` are kept in the link list but not indexed.
    pub fn from_links(node_count: usize, metric_kinds: Vec<MetricKind>, links: Vec<Link>) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut index = HashMap::with_capacity(links.len());
        for (i, link) in links.iter().enumerate() {
            if link.from.0 < node_count && link.to.0 < node_count {
                adjacency[link.from.0].push(LinkId(i));
                index.entry((link.from, link.to)).or_insert(LinkId(i));
            }
        }
        Graph {
            node_count,
            metric_kinds,
            links,
            adjacency,
            index,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn metric_kinds(&self) -> &[MetricKind] {
        &self.metric_kinds
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.0]
    }

    pub fn outgoing(&self, node: NodeId) -> &[LinkId] {
        &self.adjacency[node.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count).map(NodeId)
    }

    pub fn link_between(&self, from: NodeId, to: NodeId) -> Option<LinkId> {
        self.index.get(&(from, to)).copied()
    }

    /// Per-link scalar used by shortest-path searches: the coefficient
    /// weighted sum of the additive components.
    pub fn additive_edge_cost(&self, id: LinkId, coefficients: &CostCoefficients) -> f64 {
        let link = &self.links[id.0];
        self.metric_kinds
            .iter()
            .zip(coefficients.values())
            .zip(&link.weights.0)
            .filter(|((kind, _), _)| **kind == MetricKind::Additive)
            .map(|((_, c), w)| c * w)
            .sum()
    }

    /// True when the static cost decomposes into a sum of per-link costs.
    pub fn cost_is_additive(&self, coefficients: &CostCoefficients) -> bool {
        self.metric_kinds
            .iter()
            .zip(coefficients.values())
            .all(|(kind, c)| *kind == MetricKind::Additive || *c == 0.0)
    }

    /// Serializes to the topology text format. Each pair of opposite
    /// directed links becomes one line, in order of first appearance.
    pub fn to_topology_text(&self) -> Result<String, TopologyError> {
        let mut out = format!("nodes {}\n", self.node_count);
        if self.metric_kinds.iter().any(|k| *k != MetricKind::Additive) {
            let kinds: Vec<&str> = self.metric_kinds.iter().map(|k| k.as_str()).collect();
            out.push_str(&format!("metrics {}\n", kinds.join(",")));
        }
        let mut emitted = vec![false; self.links.len()];
        for (i, link) in self.links.iter().enumerate() {
            if emitted[i] {
                continue;
            }
            let twin = self
                .link_between(link.to, link.from)
                .filter(|t| !emitted[t.0] && t.0 != i && self.links[t.0].same_parameters(link))
                .ok_or(TopologyError::NotSymmetric {
                    from: link.from,
                    to: link.to,
                })?;
            emitted[i] = true;
            emitted[twin.0] = true;
            let weights: Vec<String> = link.weights.0.iter().map(|w| w.to_string()).collect();
            out.push_str(&format!(
                "{} {} cap={} prop={} q={} w={}\n",
                link.from,
                link.to,
                link.capacity,
                link.propagation_delay,
                link.queue_capacity,
                weights.join(",")
            ));
        }
        Ok(out)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> TopologyError {
    TopologyError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, TopologyError> {
    let v: f64 = raw
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{raw}` for `{key}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("`{key}` must be finite")));
    }
    Ok(v)
}

/// Parses topology text into a graph of bidirectional links.
pub fn load_topology(text: &str) -> Result<Graph, TopologyError> {
    let mut node_count: Option<usize> = None;
    let mut kinds: Option<Vec<MetricKind>> = None;
    let mut links: Vec<Link> = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().unwrap_or_default();

        if head == "nodes" {
            if node_count.is_some() {
                return Err(parse_err(line_no, "repeated `nodes` header"));
            }
            let n = fields
                .next()
                .ok_or_else(|| parse_err(line_no, "`nodes` needs a count"))?;
            let n: usize = n
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid node count `{n}`")))?;
            if n == 0 {
                return Err(parse_err(line_no, "node count must be positive"));
            }
            if fields.next().is_some() {
                return Err(parse_err(line_no, "trailing fields after node count"));
            }
            node_count = Some(n);
            continue;
        }
        if head == "metrics" {
            if !links.is_empty() || kinds.is_some() {
                return Err(parse_err(line_no, "`metrics` must precede all links"));
            }
            let list = fields
                .next()
                .ok_or_else(|| parse_err(line_no, "`metrics` needs a kind list"))?;
            let parsed = list
                .split(',')
                .map(|s| s.parse::<MetricKind>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| parse_err(line_no, e))?;
            kinds = Some(parsed);
            continue;
        }

        let n = node_count.ok_or(TopologyError::MissingHeader)?;
        let u: usize = head
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid node `{head}`")))?;
        let v_raw = fields
            .next()
            .ok_or_else(|| parse_err(line_no, "link needs two endpoints"))?;
        let v: usize = v_raw
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid node `{v_raw}`")))?;
        if u >= n || v >= n {
            return Err(TopologyError::DanglingNode {
                line: line_no,
                from: NodeId(u),
                to: NodeId(v),
                node_count: n,
            });
        }
        if u == v {
            return Err(parse_err(line_no, "self-loop"));
        }

        let (mut cap, mut prop, mut queue, mut weights) = (None, None, None, None);
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| parse_err(line_no, format!("expected key=value, got `{field}`")))?;
            match key {
                "cap" => cap = Some(parse_f64(line_no, key, value)?),
                "prop" => prop = Some(parse_f64(line_no, key, value)?),
                "q" => {
                    let q: usize = value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("invalid queue capacity `{value}`")))?;
                    if q == 0 {
                        return Err(parse_err(line_no, "queue capacity must be positive"));
                    }
                    queue = Some(q);
                }
                "w" => {
                    let w = value
                        .split(',')
                        .map(|c| parse_f64(line_no, key, c))
                        .collect::<Result<Vec<_>, _>>()?;
                    if w.iter().any(|c| *c < 0.0) {
                        return Err(parse_err(line_no, "weights must be non-negative"));
                    }
                    weights = Some(w);
                }
                other => return Err(parse_err(line_no, format!("unknown key `{other}`"))),
            }
        }
        let capacity = cap.ok_or_else(|| parse_err(line_no, "missing `cap`"))?;
        if capacity <= 0.0 {
            return Err(TopologyError::NonPositiveCapacity {
                line: line_no,
                capacity,
            });
        }
        let propagation_delay = prop.ok_or_else(|| parse_err(line_no, "missing `prop`"))?;
        if propagation_delay < 0.0 {
            return Err(parse_err(line_no, "propagation delay must be non-negative"));
        }
        let queue_capacity = queue.ok_or_else(|| parse_err(line_no, "missing `q`"))?;
        let weights = weights.ok_or_else(|| parse_err(line_no, "missing `w`"))?;

        let kinds = kinds.get_or_insert_with(|| vec![MetricKind::Additive; weights.len()]);
        if weights.len() != kinds.len() {
            return Err(parse_err(
                line_no,
                format!("expected {} weight components, got {}", kinds.len(), weights.len()),
            ));
        }

        let key = (u.min(v), u.max(v));
        if seen.insert(key, line_no).is_some() {
            return Err(TopologyError::DuplicateLink {
                line: line_no,
                from: NodeId(u),
                to: NodeId(v),
            });
        }
        let forward = Link {
            from: NodeId(u),
            to: NodeId(v),
            capacity,
            propagation_delay,
            queue_capacity,
            weights: WeightVector(weights),
        };
        let reverse = Link {
            from: NodeId(v),
            to: NodeId(u),
            ..forward.clone()
        };
        links.push(forward);
        links.push(reverse);
    }

    let n = node_count.ok_or(TopologyError::MissingHeader)?;
    let kinds = kinds.unwrap_or_else(|| vec![MetricKind::Additive]);
    Ok(Graph::from_links(n, kinds, links))
}

/// Static cost of a node sequence: each metric is aggregated along the path
/// according to its kind (sum, product, minimum; minima enter as their
/// reciprocal) and the aggregates are combined linearly.
pub fn static_cost(
    graph: &Graph,
    nodes: &[NodeId],
    coefficients: &CostCoefficients,
) -> Result<f64, TopologyError> {
    let kinds = graph.metric_kinds();
    if coefficients.values().len() != kinds.len() {
        return Err(TopologyError::CoefficientMismatch {
            expected: kinds.len(),
            got: coefficients.values().len(),
        });
    }
    let mut aggregates: Vec<f64> = kinds
        .iter()
        .map(|k| match k {
            MetricKind::Additive => 0.0,
            MetricKind::Multiplicative => 1.0,
            MetricKind::MinMax => f64::INFINITY,
        })
        .collect();
    for hop in nodes.windows(2) {
        let id = graph
            .link_between(hop[0], hop[1])
            .ok_or(TopologyError::MissingLink {
                from: hop[0],
                to: hop[1],
            })?;
        let weights = &graph.link(id).weights.0;
        for ((agg, kind), w) in aggregates.iter_mut().zip(kinds).zip(weights) {
            match kind {
                MetricKind::Additive => *agg += w,
                MetricKind::Multiplicative => *agg *= w,
                MetricKind::MinMax => *agg = agg.min(*w),
            }
        }
    }
    let mut cost = 0.0;
    for ((agg, kind), c) in aggregates.iter().zip(kinds).zip(coefficients.values()) {
        if *c == 0.0 {
            continue;
        }
        let term = match kind {
            MetricKind::MinMax => 1.0 / agg,
            _ => *agg,
        };
        cost += c * term;
    }
    if !cost.is_finite() || cost < 0.0 {
        return Err(TopologyError::NonFiniteCost);
    }
    Ok(cost)
}

/// A broken graph invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyGraph,
    NoMetrics,
    SelfLoop(LinkId),
    DanglingEndpoint(LinkId),
    DuplicateLink(LinkId),
    NonPositiveCapacity(LinkId),
    InvalidPropagationDelay(LinkId),
    ZeroQueueCapacity(LinkId),
    WeightArity { link: LinkId, expected: usize, got: usize },
    NegativeWeight(LinkId),
    NonPositiveBottleneck(LinkId),
    NotStronglyConnected { unreachable: Vec<NodeId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGraph => write!(f, "graph has no nodes"),
            Violation::NoMetrics => write!(f, "graph declares no metrics"),
            Violation::SelfLoop(l) => write!(f, "link #{} is a self-loop", l.0),
            Violation::DanglingEndpoint(l) => write!(f, "link #{} references a missing node", l.0),
            Violation::DuplicateLink(l) => write!(f, "link #{} duplicates an earlier link", l.0),
            Violation::NonPositiveCapacity(l) => write!(f, "link #{} has non-positive capacity", l.0),
            Violation::InvalidPropagationDelay(l) => {
                write!(f, "link #{} has a negative or non-finite propagation delay", l.0)
            }
            Violation::ZeroQueueCapacity(l) => write!(f, "link #{} has zero queue capacity", l.0),
            Violation::WeightArity { link, expected, got } => write!(
                f,
                "link #{} has {got} weight components, expected {expected}",
                link.0
            ),
            Violation::NegativeWeight(l) => write!(f, "link #{} has a negative weight", l.0),
            Violation::NonPositiveBottleneck(l) => {
                write!(f, "link #{} has a non-positive min-max weight", l.0)
            }
            Violation::NotStronglyConnected { unreachable } => {
                let ids: Vec<String> = unreachable.iter().map(|n| n.to_string()).collect();
                write!(f, "graph is not strongly connected; cut off: {}", ids.join(","))
            }
        }
    }
}

fn reach(graph: &Graph, start: NodeId, reverse: bool) -> Vec<bool> {
    let n = graph.node_count();
    let mut incoming: Vec<Vec<NodeId>> = Vec::new();
    if reverse {
        incoming = vec![Vec::new(); n];
        for link in graph.links() {
            if link.from.0 < n && link.to.0 < n {
                incoming[link.to.0].push(link.from);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start.0] = true;
    while let Some(u) = queue.pop_front() {
        let next: Vec<NodeId> = if reverse {
            incoming[u.0].clone()
        } else {
            graph.outgoing(u).iter().map(|l| graph.link(*l).to).collect()
        };
        for v in next {
            if !seen[v.0] {
                seen[v.0] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Lists every broken invariant; empty iff the graph is well formed and
/// strongly connected.
pub fn validate_graph(graph: &Graph) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = graph.node_count();
    if n == 0 {
        out.push(Violation::EmptyGraph);
        return out;
    }
    let m = graph.metric_kinds().len();
    if m == 0 {
        out.push(Violation::NoMetrics);
    }
    let mut seen = HashMap::new();
    for (i, link) in graph.links().iter().enumerate() {
        let id = LinkId(i);
        if link.from.0 >= n || link.to.0 >= n {
            out.push(Violation::DanglingEndpoint(id));
        } else if link.from == link.to {
            out.push(Violation::SelfLoop(id));
        }
        if seen.insert((link.from, link.to), id).is_some() {
            out.push(Violation::DuplicateLink(id));
        }
        if !(link.capacity > 0.0 && link.capacity.is_finite()) {
            out.push(Violation::NonPositiveCapacity(id));
        }
        if !(link.propagation_delay >= 0.0 && link.propagation_delay.is_finite()) {
            out.push(Violation::InvalidPropagationDelay(id));
        }
        if link.queue_capacity == 0 {
            out.push(Violation::ZeroQueueCapacity(id));
        }
        if link.weights.len() != m {
            out.push(Violation::WeightArity {
                link: id,
                expected: m,
                got: link.weights.len(),
            });
        }
        if link.weights.0.iter().any(|w| !w.is_finite() || *w < 0.0) {
            out.push(Violation::NegativeWeight(id));
        }
        let bottleneck_bad = graph
            .metric_kinds()
            .iter()
            .zip(&link.weights.0)
            .any(|(k, w)| *k == MetricKind::MinMax && *w <= 0.0);
        if bottleneck_bad {
            out.push(Violation::NonPositiveBottleneck(id));
        }
    }
    let forward = reach(graph, NodeId(0), false);
    let backward = reach(graph, NodeId(0), true);
    let unreachable: Vec<NodeId> = (0..n)
        .filter(|i| !(forward[*i] && backward[*i]))
        .map(NodeId)
        .collect();
    if !unreachable.is_empty() {
        out.push(Violation::NotStronglyConnected { unreachable });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = "nodes 3\n0 1 cap=1e6 prop=0.001 q=50 w=1\n1 2 cap=1e6 prop=0.001 q=50 w=1\n";

    fn nodes(ids: &[usize]) -> Vec<NodeId> {
        ids.iter().copied().map(NodeId).collect()
    }

    #[test]
    fn two_node_file_yields_two_directed_links() {
        let g = load_topology("nodes 2\n0 1 cap=1e6 prop=0.001 q=50 w=1\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.link_count(), 2);
        let fwd = g.link(g.link_between(NodeId(0), NodeId(1)).unwrap());
        let rev = g.link(g.link_between(NodeId(1), NodeId(0)).unwrap());
        assert_eq!(fwd.capacity, 1e6);
        assert!(fwd.same_parameters(rev));
    }

    #[test]
    fn dangling_node_is_rejected() {
        let err = load_topology("nodes 3\n0 9 cap=1e6 prop=0.001 q=50 w=1\n").unwrap_err();
        assert!(matches!(err, TopologyError::DanglingNode { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_link_is_rejected_in_either_direction() {
        let err = load_topology(
            "nodes 2\n0 1 cap=1e6 prop=0.001 q=50 w=1\n1 0 cap=1e6 prop=0.001 q=50 w=1\n",
        )
        .unwrap_err();
        assert!(matches!(err, TopologyError::DuplicateLink { line: 3, .. }));
    }

    #[test]
    fn non_positive_capacity_is_rejected() {
        let err = load_topology("nodes 2\n0 1 cap=0 prop=0.001 q=50 w=1\n").unwrap_err();
        assert!(matches!(err, TopologyError::NonPositiveCapacity { line: 2, .. }));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = load_topology("# header\nnodes 2\n\n0 1 cap=abc prop=0.001 q=50 w=1\n").unwrap_err();
        assert_eq!(err.to_string(), "line 4: invalid number `abc` for `cap`");
        assert_eq!(
            load_topology("0 1 cap=1 prop=0 q=1 w=1\n").unwrap_err(),
            TopologyError::MissingHeader
        );
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let g = load_topology("# c\n\nnodes 2 # two\n0 1 cap=1e6 prop=0 q=1 w=1 # link\n").unwrap();
        assert_eq!(g.link_count(), 2);
    }

    #[test]
    fn serialization_round_trips() {
        let g = load_topology(LINE).unwrap();
        let text = g.to_topology_text().unwrap();
        assert_eq!(text, LINE.replace("1e6", "1000000"));
        let again = load_topology(&text).unwrap();
        assert_eq!(again, g);
        assert_eq!(again.to_topology_text().unwrap(), text);
    }

    #[test]
    fn unit_cost_is_hop_count() {
        let g = load_topology(
            "nodes 4\n0 1 cap=1 prop=0 q=1 w=1\n1 2 cap=1 prop=0 q=1 w=1\n2 3 cap=1 prop=0 q=1 w=1\n",
        )
        .unwrap();
        let c = CostCoefficients::unit();
        assert_eq!(static_cost(&g, &nodes(&[0, 1, 2, 3]), &c).unwrap(), 3.0);
        assert_eq!(static_cost(&g, &nodes(&[2]), &c).unwrap(), 0.0);
    }

    #[test]
    fn two_metric_linear_combination() {
        let g = load_topology("nodes 3\n0 1 cap=1 prop=0 q=1 w=1,2\n1 2 cap=1 prop=0 q=1 w=3,4\n").unwrap();
        let c = CostCoefficients::new(vec![1.0, 0.5]).unwrap();
        let p = nodes(&[0, 1, 2]);
        // Brute-force accumulation per edge.
        let mut sums = [0.0, 0.0];
        for hop in p.windows(2) {
            let l = g.link(g.link_between(hop[0], hop[1]).unwrap());
            sums[0] += l.weights.0[0];
            sums[1] += l.weights.0[1];
        }
        let expected = 1.0 * sums[0] + 0.5 * sums[1];
        assert_eq!(expected, 7.0);
        assert_eq!(static_cost(&g, &p, &c).unwrap(), expected);
    }

    #[test]
    fn bottleneck_bandwidth_enters_as_reciprocal() {
        let g = load_topology(
            "nodes 3\nmetrics additive,min-max\n0 1 cap=1 prop=0 q=1 w=1,4\n1 2 cap=1 prop=0 q=1 w=1,2\n",
        )
        .unwrap();
        let c = CostCoefficients::new(vec![1.0, 8.0]).unwrap();
        assert_eq!(static_cost(&g, &nodes(&[0, 1, 2]), &c).unwrap(), 2.0 + 8.0 / 2.0);
        assert_eq!(static_cost(&g, &nodes(&[0]), &c).unwrap(), 0.0);
        assert!(!g.cost_is_additive(&c));
    }

    #[test]
    fn multiplicative_metric_is_multiplied() {
        let g = load_topology(
            "nodes 3\nmetrics multiplicative\n0 1 cap=1 prop=0 q=1 w=0.5\n1 2 cap=1 prop=0 q=1 w=0.25\n",
        )
        .unwrap();
        let cost = static_cost(&g, &nodes(&[0, 1, 2]), &CostCoefficients::unit()).unwrap();
        assert_eq!(cost, 0.125);
    }

    #[test]
    fn missing_edge_is_an_error() {
        let g = load_topology(LINE).unwrap();
        let err = static_cost(&g, &nodes(&[0, 2]), &CostCoefficients::unit()).unwrap_err();
        assert_eq!(
            err,
            TopologyError::MissingLink {
                from: NodeId(0),
                to: NodeId(2)
            }
        );
    }

    #[test]
    fn isolated_node_is_a_connectivity_violation() {
        let g = load_topology("nodes 3\n0 1 cap=1 prop=0 q=1 w=1\n").unwrap();
        let v = validate_graph(&g);
        assert_eq!(
            v,
            vec![Violation::NotStronglyConnected {
                unreachable: vec![NodeId(2)]
            }]
        );
    }

    #[test]
    fn negative_weight_is_reported() {
        let mut g = load_topology(LINE).unwrap();
        let mut links = g.links().to_vec();
        links[0].weights = WeightVector(vec![-1.0]);
        g = Graph::from_links(g.node_count(), g.metric_kinds().to_vec(), links);
        assert_eq!(validate_graph(&g), vec![Violation::NegativeWeight(LinkId(0))]);
    }

    #[test]
    fn well_formed_graph_validates_clean() {
        assert!(validate_graph(&load_topology(LINE).unwrap()).is_empty());
    }

    #[test]
    fn coefficient_rules() {
        assert!(CostCoefficients::new(vec![]).is_err());
        assert!(CostCoefficients::new(vec![0.0, 0.0]).is_err());
        assert!(CostCoefficients::new(vec![-1.0, 1.0]).is_err());
        assert!(CostCoefficients::new(vec![0.0, 2.0]).is_ok());
    }
}
