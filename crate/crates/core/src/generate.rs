//! Seeded random bicoloured graphs with bounded degree.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{preferences_from_weights, BicolouredGraph, Edge, GraphParts, NodeId};

/// Weights of random weighted instances are drawn uniformly from this range.
pub const WEIGHT_RANGE: core::ops::RangeInclusive<u64> = 1..=100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomGraphConfig {
    pub red_count: u32,
    pub blue_count: u32,
    pub max_degree: u32,
    pub seed: u64,
    pub weighted: bool,
    pub ties: bool,
}

impl RandomGraphConfig {
    pub fn new(red_count: u32, blue_count: u32, max_degree: u32, seed: u64) -> Self {
        RandomGraphConfig { red_count, blue_count, max_degree, seed, weighted: false, ties: false }
    }

    pub fn weighted(mut self, yes: bool) -> Self {
        self.weighted = yes;
        self
    }

    pub fn ties(mut self, yes: bool) -> Self {
        self.ties = yes;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("both colour classes need at least one node")]
    EmptyColourClass,
    #[error("max degree must be at least 1")]
    ZeroDegree,
    #[error(
        "isolation unavoidable: {red_count} red and {blue_count} blue nodes cannot all be covered with max degree {max_degree}"
    )]
    IsolationUnavoidable { red_count: u32, blue_count: u32, max_degree: u32 },
}

/// Generates a valid graph with max degree at most `max_degree` and no
/// isolated nodes. Preference lists are uniformly random permutations, or
/// derived from uniform weights when `weighted` is set.
pub fn generate_random(config: &RandomGraphConfig) -> Result<BicolouredGraph, GenerateError> {
    let RandomGraphConfig { red_count, blue_count, max_degree, seed, weighted, ties } = *config;
    if red_count == 0 || blue_count == 0 {
        return Err(GenerateError::EmptyColourClass);
    }
    if max_degree == 0 {
        return Err(GenerateError::ZeroDegree);
    }
    let cap = max_degree as u64;
    if red_count as u64 > blue_count as u64 * cap || blue_count as u64 > red_count as u64 * cap {
        return Err(GenerateError::IsolationUnavoidable { red_count, blue_count, max_degree });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = red_count as usize + blue_count as usize;
    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let connect = |adj: &mut Vec<Vec<NodeId>>, r: NodeId, b: NodeId| {
        adj[r.index()].push(b);
        adj[b.index()].push(r);
    };

    // Cover every node: deal the larger class round-robin onto the smaller one.
    let mut reds: Vec<NodeId> = (1..=red_count).map(NodeId).collect();
    let mut blues: Vec<NodeId> = (red_count + 1..=red_count + blue_count).map(NodeId).collect();
    reds.shuffle(&mut rng);
    blues.shuffle(&mut rng);
    if reds.len() >= blues.len() {
        for (k, &r) in reds.iter().enumerate() {
            connect(&mut adjacency, r, blues[k % blues.len()]);
        }
    } else {
        for (k, &b) in blues.iter().enumerate() {
            connect(&mut adjacency, reds[k % reds.len()], b);
        }
    }

    // Random extra edges up to the degree cap.
    let attempts = red_count as u64 * cap;
    let limit = max_degree as usize;
    for _ in 0..attempts {
        let r = NodeId(rng.gen_range(1..=red_count));
        let b = NodeId(rng.gen_range(red_count + 1..=red_count + blue_count));
        if adjacency[r.index()].len() < limit
            && adjacency[b.index()].len() < limit
            && !adjacency[r.index()].contains(&b)
        {
            connect(&mut adjacency, r, b);
        }
    }

    for list in &mut adjacency {
        list.shuffle(&mut rng);
    }

    let mut parts = if weighted {
        let weighted_edges: Vec<(Edge, u64)> = (1..=red_count)
            .map(NodeId)
            .flat_map(|r| adjacency[r.index()].iter().map(move |&b| Edge::new(r, b)))
            .collect::<Vec<_>>()
            .into_iter()
            .map(|e| (e, rng.gen_range(WEIGHT_RANGE)))
            .collect();
        preferences_from_weights(red_count, blue_count, &weighted_edges)
            .expect("generated edges are valid")
            .to_parts()
    } else {
        GraphParts { red_count, blue_count, adjacency, weights: None, ties: None }
    };

    if ties {
        let markers = parts
            .adjacency
            .iter()
            .enumerate()
            .map(|(i, list)| {
                (0..list.len())
                    .map(|k| {
                        let allowed = k > 0
                            && parts.weights.as_ref().is_none_or(|w| w[i][k] == w[i][k - 1]);
                        allowed && rng.gen_bool(1.0 / 3.0)
                    })
                    .collect()
            })
            .collect();
        parts.ties = Some(markers);
    }

    Ok(BicolouredGraph::new(parts).expect("generator produces valid graphs"))
}
