//! Bicoloured preference graphs and matchings.
//!
//! Node ids are 1-based: red nodes are `1..=red_count`, blue nodes follow as
//! `red_count+1..=red_count+blue_count`. Each node's neighbour list is its
//! preference order, most preferred first, and the position in that list is
//! the port number the node uses to talk to that neighbour.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    /// Zero-based position of this node in per-node tables.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        NodeId(index as u32 + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Colour {
    Red,
    Blue,
}

/// An edge, always stored with its red endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub red: NodeId,
    pub blue: NodeId,
}

impl Edge {
    pub fn new(red: NodeId, blue: NodeId) -> Self {
        Edge { red, blue }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.red, self.blue)
    }
}

/// One broken invariant found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoNodes,
    AdjacencyLength { expected: usize, found: usize },
    Isolated { node: NodeId },
    UnknownNeighbour { node: NodeId, neighbour: NodeId },
    SelfLoop { node: NodeId },
    SameColour { node: NodeId, neighbour: NodeId },
    DuplicateEdge { node: NodeId, neighbour: NodeId },
    Asymmetric { node: NodeId, neighbour: NodeId },
    WeightsShape { node: NodeId },
    NonPositiveWeight { node: NodeId, neighbour: NodeId },
    WeightMismatch { edge: Edge },
    WeightOrder { node: NodeId, earlier: NodeId, later: NodeId },
    TiesShape { node: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoNodes => write!(f, "graph has no nodes (max degree must be at least 1)"),
            Violation::AdjacencyLength { expected, found } => {
                write!(f, "expected {expected} adjacency lists, found {found}")
            }
            Violation::Isolated { node } => {
                write!(f, "node {node} has no neighbours (no isolated nodes allowed)")
            }
            Violation::UnknownNeighbour { node, neighbour } => {
                write!(f, "node {node} lists unknown neighbour {neighbour}")
            }
            Violation::SelfLoop { node } => write!(f, "node {node} has a self-loop"),
            Violation::SameColour { node, neighbour } => write!(
                f,
                "edge {node}-{neighbour} joins two nodes of the same colour (not bipartite)"
            ),
            Violation::DuplicateEdge { node, neighbour } => {
                write!(f, "node {node} lists neighbour {neighbour} more than once")
            }
            Violation::Asymmetric { node, neighbour } => write!(
                f,
                "asymmetric adjacency: {node} lists {neighbour} but not the other way round"
            ),
            Violation::WeightsShape { node } => {
                write!(f, "weight list of node {node} does not match its neighbour list")
            }
            Violation::NonPositiveWeight { node, neighbour } => {
                write!(f, "edge {node}-{neighbour} has a non-positive weight")
            }
            Violation::WeightMismatch { edge } => {
                write!(f, "edge {edge} has different weights at its two endpoints")
            }
            Violation::WeightOrder { node, earlier, later } => write!(
                f,
                "node {node} prefers {earlier} over {later} but the weights do not respect that"
            ),
            Violation::TiesShape { node } => {
                write!(f, "tie markers of node {node} do not cover its neighbour list")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
    #[error("edge {0} has a non-positive weight")]
    NonPositiveWeight(Edge),
}

/// Raw, unvalidated description of a graph.
///
/// `ties[v][k] == true` means neighbour `k` of `v` is tied with neighbour
/// `k - 1`, so the list splits into consecutive equal-preference blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphParts {
    pub red_count: u32,
    pub blue_count: u32,
    pub adjacency: Vec<Vec<NodeId>>,
    pub weights: Option<Vec<Vec<u64>>>,
    pub ties: Option<Vec<Vec<bool>>>,
}

impl GraphParts {
    fn node_count(&self) -> usize {
        self.red_count as usize + self.blue_count as usize
    }

    fn colour(&self, v: NodeId) -> Option<Colour> {
        if v.0 == 0 || v.0 as usize > self.node_count() {
            None
        } else if v.0 <= self.red_count {
            Some(Colour::Red)
        } else {
            Some(Colour::Blue)
        }
    }
}

/// Checks every structural invariant and reports all violations found.
pub fn validate(parts: &GraphParts) -> ValidationReport {
    let mut violations = Vec::new();
    let n = parts.node_count();
    if n == 0 {
        violations.push(Violation::NoNodes);
    }
    if parts.adjacency.len() != n {
        violations.push(Violation::AdjacencyLength { expected: n, found: parts.adjacency.len() });
    }

    for (i, list) in parts.adjacency.iter().enumerate().take(n) {
        let v = NodeId::from_index(i);
        let own = parts.colour(v);
        if list.is_empty() {
            violations.push(Violation::Isolated { node: v });
        }
        for (k, &u) in list.iter().enumerate() {
            let Some(theirs) = parts.colour(u) else {
                violations.push(Violation::UnknownNeighbour { node: v, neighbour: u });
                continue;
            };
            if u == v {
                violations.push(Violation::SelfLoop { node: v });
                continue;
            }
            if Some(theirs) == own {
                // report each monochromatic edge once
                if v < u || !parts.adjacency.get(u.index()).is_some_and(|l| l.contains(&v)) {
                    violations.push(Violation::SameColour { node: v, neighbour: u });
                }
                continue;
            }
            if list[..k].contains(&u) {
                violations.push(Violation::DuplicateEdge { node: v, neighbour: u });
                continue;
            }
            if !parts.adjacency.get(u.index()).is_some_and(|l| l.contains(&v)) {
                violations.push(Violation::Asymmetric { node: v, neighbour: u });
            }
        }
    }

    if let Some(weights) = &parts.weights {
        check_weights(parts, weights, &mut violations);
    }

    if let Some(ties) = &parts.ties {
        for (i, list) in parts.adjacency.iter().enumerate().take(n) {
            let v = NodeId::from_index(i);
            match ties.get(i) {
                Some(t) if t.len() == list.len() && t.first() != Some(&true) => {}
                _ => violations.push(Violation::TiesShape { node: v }),
            }
        }
        if ties.len() != parts.adjacency.len() && n == parts.adjacency.len() {
            for i in parts.adjacency.len()..ties.len() {
                violations.push(Violation::TiesShape { node: NodeId::from_index(i) });
            }
        }
    }

    ValidationReport { violations }
}

fn check_weights(parts: &GraphParts, weights: &[Vec<u64>], violations: &mut Vec<Violation>) {
    let n = parts.node_count();
    for (i, list) in parts.adjacency.iter().enumerate().take(n) {
        let v = NodeId::from_index(i);
        let Some(ws) = weights.get(i).filter(|w| w.len() == list.len()) else {
            violations.push(Violation::WeightsShape { node: v });
            continue;
        };
        for (k, (&u, &w)) in list.iter().zip(ws).enumerate() {
            if w == 0 {
                violations.push(Violation::NonPositiveWeight { node: v, neighbour: u });
            }
            if k > 0 && ws[k - 1] < w {
                violations.push(Violation::WeightOrder { node: v, earlier: list[k - 1], later: u });
            }
            // compare both endpoints once, from the red side
            if parts.colour(v) == Some(Colour::Red) && parts.colour(u) == Some(Colour::Blue) {
                let other = parts.adjacency.get(u.index()).and_then(|l| {
                    let pos = l.iter().position(|&x| x == v)?;
                    weights.get(u.index())?.get(pos).copied()
                });
                if let Some(other) = other {
                    if other != w {
                        violations.push(Violation::WeightMismatch { edge: Edge::new(v, u) });
                    }
                }
            }
        }
    }
}

/// A validated bicoloured preference graph. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BicolouredGraph {
    red_count: u32,
    blue_count: u32,
    adjacency: Vec<Vec<NodeId>>,
    weights: Option<Vec<Vec<u64>>>,
    ties: Option<Vec<Vec<bool>>>,
    // back_port[v][k]: position of v in the list of its k-th neighbour
    back_port: Vec<Vec<u32>>,
    // rank[v][k]: index of the tie group containing port k
    rank: Vec<Vec<u32>>,
    max_degree: usize,
    edge_count: usize,
}

impl BicolouredGraph {
    pub fn new(parts: GraphParts) -> Result<Self, GraphError> {
        let report = validate(&parts);
        if !report.is_valid() {
            return Err(GraphError::Invalid(report));
        }
        Ok(Self::from_valid_parts(parts))
    }

    /// Builds derived tables for parts already known to be valid.
    pub(crate) fn from_valid_parts(parts: GraphParts) -> Self {
        debug_assert!(validate(&parts).is_valid(), "{}", validate(&parts));
        let GraphParts { red_count, blue_count, adjacency, weights, ties } = parts;
        // all-false markers mean the same as none
        let ties = ties.filter(|t| t.iter().flatten().any(|&x| x));
        let back_port = adjacency
            .iter()
            .enumerate()
            .map(|(i, list)| {
                let v = NodeId::from_index(i);
                list.iter()
                    .map(|u| adjacency[u.index()].iter().position(|&x| x == v).unwrap() as u32)
                    .collect()
            })
            .collect();
        let rank = adjacency
            .iter()
            .enumerate()
            .map(|(i, list)| match &ties {
                None => (0..list.len() as u32).collect(),
                Some(t) => {
                    let mut group = 0u32;
                    t[i].iter()
                        .enumerate()
                        .map(|(k, &tied)| {
                            if k > 0 && !tied {
                                group += 1;
                            }
                            group
                        })
                        .collect()
                }
            })
            .collect();
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        let edge_count = adjacency[..red_count as usize].iter().map(Vec::len).sum();
        BicolouredGraph {
            red_count,
            blue_count,
            adjacency,
            weights,
            ties,
            back_port,
            rank,
            max_degree,
            edge_count,
        }
    }

    pub fn red_count(&self) -> u32 {
        self.red_count
    }

    pub fn blue_count(&self) -> u32 {
        self.blue_count
    }

    pub fn node_count(&self) -> usize {
        self.red_count as usize + self.blue_count as usize
    }

    /// Δ, the maximum degree.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn colour(&self, v: NodeId) -> Colour {
        if v.0 <= self.red_count {
            Colour::Red
        } else {
            Colour::Blue
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.0 >= 1 && v.0 as usize <= self.node_count()
    }

    pub fn reds(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.red_count).map(NodeId)
    }

    pub fn blues(&self) -> impl Iterator<Item = NodeId> {
        (self.red_count + 1..=self.red_count + self.blue_count).map(NodeId)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.node_count() as u32).map(NodeId)
    }

    /// Neighbours in preference order; the index is the port number.
    pub fn neighbours(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn has_ties(&self) -> bool {
        self.ties.is_some()
    }

    /// Weight of the edge behind port `port` of `v`; 1 for unweighted graphs.
    #[inline]
    pub fn weight_at(&self, v: NodeId, port: usize) -> u64 {
        match &self.weights {
            Some(w) => w[v.index()][port],
            None => 1,
        }
    }

    #[inline]
    pub fn back_port(&self, v: NodeId, port: usize) -> usize {
        self.back_port[v.index()][port] as usize
    }

    /// Tie-group index of port `port` of `v`; lower is more preferred.
    #[inline]
    pub fn rank_at(&self, v: NodeId, port: usize) -> u32 {
        self.rank[v.index()][port]
    }

    pub fn tied_with_previous(&self, v: NodeId, port: usize) -> bool {
        self.ties.as_ref().is_some_and(|t| t[v.index()][port])
    }

    pub fn port_of(&self, v: NodeId, u: NodeId) -> Option<usize> {
        self.adjacency[v.index()].iter().position(|&x| x == u)
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.contains(e.red)
            && self.colour(e.red) == Colour::Red
            && self.port_of(e.red, e.blue).is_some()
    }

    /// `w(e)`, or `None` if `e` is not an edge of the graph.
    pub fn weight(&self, e: Edge) -> Option<u64> {
        if !self.contains(e.red) || self.colour(e.red) != Colour::Red {
            return None;
        }
        self.port_of(e.red, e.blue).map(|k| self.weight_at(e.red, k))
    }

    /// Strict preference of `v` for `x` over `y`: `x` sits in an earlier tie group.
    pub fn prefers(&self, v: NodeId, x: NodeId, y: NodeId) -> bool {
        match (self.port_of(v, x), self.port_of(v, y)) {
            (Some(a), Some(b)) => self.rank_at(v, a) < self.rank_at(v, b),
            _ => false,
        }
    }

    /// All edges, red-major, each red's edges in its preference order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.reds().flat_map(move |r| self.neighbours(r).iter().map(move |&b| Edge::new(r, b)))
    }

    /// Sum of `w(e)` over a set of edges.
    pub fn total_weight<'a>(&self, edges: impl IntoIterator<Item = &'a Edge>) -> u64 {
        edges.into_iter().map(|&e| self.weight(e).unwrap_or(0)).sum()
    }

    pub fn to_parts(&self) -> GraphParts {
        GraphParts {
            red_count: self.red_count,
            blue_count: self.blue_count,
            adjacency: self.adjacency.clone(),
            weights: self.weights.clone(),
            ties: self.ties.clone(),
        }
    }

    /// The same graph with `w(e) = 1` on every edge.
    pub fn unit_weights(&self) -> BicolouredGraph {
        let mut g = self.clone();
        g.weights = Some(self.adjacency.iter().map(|l| vec![1; l.len()]).collect());
        g
    }

    /// The same graph with tie markers dropped, so the list order becomes a strict order.
    pub fn tie_broken(&self) -> BicolouredGraph {
        let mut parts = self.to_parts();
        parts.ties = None;
        Self::from_valid_parts(parts)
    }

    /// Rebuilds preference orders from the current weights.
    pub fn reorder_by_weights(&self) -> Result<BicolouredGraph, GraphError> {
        let weighted: Vec<(Edge, u64)> = self.edges().map(|e| (e, self.weight(e).unwrap())).collect();
        preferences_from_weights(self.red_count, self.blue_count, &weighted)
    }
}

/// Orders every node's neighbours by strictly decreasing weight, breaking
/// equal weights by ascending neighbour id.
pub fn preferences_from_weights(
    red_count: u32,
    blue_count: u32,
    weighted_edges: &[(Edge, u64)],
) -> Result<BicolouredGraph, GraphError> {
    let n = red_count as usize + blue_count as usize;
    let mut lists: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); n];
    for &(e, w) in weighted_edges {
        if w == 0 {
            return Err(GraphError::NonPositiveWeight(e));
        }
        if e.red.0 == 0 || e.blue.0 == 0 || e.red.index() >= n || e.blue.index() >= n {
            let mut report = ValidationReport::default();
            report.violations.push(Violation::UnknownNeighbour { node: e.red, neighbour: e.blue });
            return Err(GraphError::Invalid(report));
        }
        lists[e.red.index()].push((e.blue, w));
        lists[e.blue.index()].push((e.red, w));
    }
    for list in &mut lists {
        list.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    }
    let parts = GraphParts {
        red_count,
        blue_count,
        adjacency: lists.iter().map(|l| l.iter().map(|&(u, _)| u).collect()).collect(),
        weights: Some(lists.iter().map(|l| l.iter().map(|&(_, w)| w).collect()).collect()),
        ties: None,
    };
    BicolouredGraph::new(parts)
}

/// A set of edges, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        Matching { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// `w(M)` under the graph's weights.
    pub fn weight(&self, graph: &BicolouredGraph) -> u64 {
        graph.total_weight(&self.edges)
    }

    /// Every edge is in the graph and no node is covered twice.
    pub fn is_valid_for(&self, graph: &BicolouredGraph) -> bool {
        let mut used = vec![false; graph.node_count()];
        for &e in &self.edges {
            if !graph.has_edge(e) || used[e.red.index()] || used[e.blue.index()] {
                return false;
            }
            used[e.red.index()] = true;
            used[e.blue.index()] = true;
        }
        true
    }

    /// Partner of every node, indexed by [`NodeId::index`].
    pub fn partners(&self, graph: &BicolouredGraph) -> Vec<Option<NodeId>> {
        let mut partner = vec![None; graph.node_count()];
        for &e in &self.edges {
            partner[e.red.index()] = Some(e.blue);
            partner[e.blue.index()] = Some(e.red);
        }
        partner
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s += &alloc::format!("{e}");
        }
        write!(f, "[{s}]")
    }
}
