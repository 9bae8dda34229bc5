//! Line-based text format for preference graphs.
//!
//! ```text
//! # comment
//! 2 2
//! 1 : 3 4
//! 2 : 3
//! 3 : 2 1
//! 4 : 1
//! ```
//!
//! The first line holds the red and blue counts. Every other line lists one
//! node's neighbours in preference order. A neighbour token is
//! `id[:weight][,tie]`; weights appear on every token or on none, and `,tie`
//! marks a neighbour tied with the one before it.

use std::fmt::Write as _;

use thiserror::Error;
use truncgs_core::{validate, BicolouredGraph, GraphParts, NodeId, ValidationReport, Violation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("dangling neighbour id {neighbour} listed by node {node}")]
    Dangling { node: NodeId, neighbour: NodeId },
    #[error("asymmetric adjacency: {node} lists {neighbour} but not the other way round")]
    Asymmetric { node: NodeId, neighbour: NodeId },
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
}

fn malformed(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Malformed { line, reason: reason.into() }
}

struct Token {
    id: NodeId,
    weight: Option<u64>,
    tie: bool,
}

fn parse_token(line: usize, tok: &str) -> Result<Token, FormatError> {
    let (body, tie) = match tok.split_once(',') {
        Some((body, "tie")) => (body, true),
        Some(_) => return Err(malformed(line, format!("bad tie marker in `{tok}`"))),
        None => (tok, false),
    };
    let (id, weight) = match body.split_once(':') {
        Some((id, w)) => {
            let w: u64 = w.parse().map_err(|_| malformed(line, format!("bad weight in `{tok}`")))?;
            (id, Some(w))
        }
        None => (body, None),
    };
    let id: u32 = id.parse().map_err(|_| malformed(line, format!("bad neighbour id in `{tok}`")))?;
    Ok(Token { id: NodeId(id), weight, tie })
}

/// Parses a graph and checks every invariant.
pub fn parse(text: &str) -> Result<BicolouredGraph, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| malformed(1, "missing header"))?;
    let counts: Vec<u32> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| malformed(header_line, "header must be `red_count blue_count`"))?;
    let [red_count, blue_count] = counts[..] else {
        return Err(malformed(header_line, "header must be `red_count blue_count`"));
    };
    let n = red_count as usize + blue_count as usize;

    let mut adjacency: Vec<Option<Vec<NodeId>>> = vec![None; n];
    let mut weights: Vec<Vec<u64>> = vec![Vec::new(); n];
    let mut ties: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut weighted: Option<bool> = None;
    let mut any_tie = false;

    for (line, content) in lines {
        let (node, rest) =
            content.split_once(':').ok_or_else(|| malformed(line, "expected `node_id : neighbours`"))?;
        let node: u32 =
            node.trim().parse().map_err(|_| malformed(line, format!("bad node id `{}`", node.trim())))?;
        if node == 0 || node as usize > n {
            return Err(malformed(line, format!("node id {node} out of range 1..={n}")));
        }
        let slot = node as usize - 1;
        if adjacency[slot].is_some() {
            return Err(malformed(line, format!("node {node} listed twice")));
        }
        let mut list = Vec::new();
        for tok in rest.split_whitespace() {
            let t = parse_token(line, tok)?;
            let has_weight = t.weight.is_some();
            if *weighted.get_or_insert(has_weight) != has_weight {
                return Err(malformed(line, "weights must be given on every neighbour or on none"));
            }
            if t.tie && list.is_empty() {
                return Err(malformed(line, "first neighbour cannot be tied with a previous one"));
            }
            any_tie |= t.tie;
            list.push(t.id);
            weights[slot].push(t.weight.unwrap_or(0));
            ties[slot].push(t.tie);
        }
        adjacency[slot] = Some(list);
    }

    let parts = GraphParts {
        red_count,
        blue_count,
        adjacency: adjacency.into_iter().map(Option::unwrap_or_default).collect(),
        weights: (weighted == Some(true)).then_some(weights),
        ties: any_tie.then_some(ties),
    };
    let report = validate(&parts);
    for v in &report.violations {
        match *v {
            Violation::UnknownNeighbour { node, neighbour } => {
                return Err(FormatError::Dangling { node, neighbour })
            }
            Violation::Asymmetric { node, neighbour } => {
                return Err(FormatError::Asymmetric { node, neighbour })
            }
            _ => {}
        }
    }
    if !report.is_valid() {
        return Err(FormatError::Invalid(report));
    }
    Ok(BicolouredGraph::new(parts).expect("validated above"))
}

/// Canonical text form: header, then one line per node in id order.
pub fn serialize(graph: &BicolouredGraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", graph.red_count(), graph.blue_count()).unwrap();
    for v in graph.nodes() {
        write!(out, "{v} :").unwrap();
        for (k, u) in graph.neighbours(v).iter().enumerate() {
            write!(out, " {u}").unwrap();
            if graph.is_weighted() {
                write!(out, ":{}", graph.weight_at(v, k)).unwrap();
            }
            if graph.tied_with_previous(v, k) {
                out.push_str(",tie");
            }
        }
        out.push('\n');
    }
    out
}
