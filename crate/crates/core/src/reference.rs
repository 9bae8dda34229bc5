//! Centralised oracles: sequential Gale-Shapley, greedy matching and
//! exhaustive maximum-weight matching.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{BicolouredGraph, Edge, Matching, NodeId};

/// Largest edge count accepted by [`max_weight_matching_bruteforce`].
pub const BRUTE_FORCE_EDGE_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum BruteForceError {
    #[error("{edges} edges exceed the brute-force cap of {cap}")]
    TooLarge { edges: usize, cap: usize },
}

/// Textbook red-proposing Gale-Shapley with a queue of free red nodes.
///
/// List order is taken as a strict order, so tie markers are ignored.
pub fn stable_matching_reference(graph: &BicolouredGraph) -> Matching {
    let reds = graph.red_count() as usize;
    let mut next = vec![0usize; reds];
    let mut holder: Vec<Option<(NodeId, usize)>> = vec![None; graph.node_count()];
    let mut free: VecDeque<NodeId> = graph.reds().collect();

    while let Some(r) = free.pop_front() {
        let Some(&b) = graph.neighbours(r).get(next[r.index()]) else {
            continue;
        };
        next[r.index()] += 1;
        let rank = graph.port_of(b, r).expect("symmetric adjacency");
        match holder[b.index()] {
            None => holder[b.index()] = Some((r, rank)),
            Some((cur, cur_rank)) if rank < cur_rank => {
                holder[b.index()] = Some((r, rank));
                free.push_back(cur);
            }
            Some(_) => free.push_back(r),
        }
    }

    Matching::from_edges(
        graph.blues().filter_map(|b| holder[b.index()].map(|(r, _)| Edge::new(r, b))),
    )
}

/// Adds edges in order of decreasing weight, ties by `(red, blue)` id,
/// skipping any edge that touches an already matched node.
pub fn greedy_matching(graph: &BicolouredGraph) -> Matching {
    let mut edges: Vec<(u64, Edge)> =
        graph.edges().map(|e| (graph.weight(e).expect("edge of graph"), e)).collect();
    edges.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut used = vec![false; graph.node_count()];
    let mut chosen = Vec::new();
    for (_, e) in edges {
        if !used[e.red.index()] && !used[e.blue.index()] {
            used[e.red.index()] = true;
            used[e.blue.index()] = true;
            chosen.push(e);
        }
    }
    Matching::from_edges(chosen)
}

/// Maximum-weight matching by exhaustive search; among optima the
/// lexicographically least sorted edge list wins.
pub fn max_weight_matching_bruteforce(graph: &BicolouredGraph) -> Result<Matching, BruteForceError> {
    let mut edges: Vec<Edge> = graph.edges().collect();
    if edges.len() > BRUTE_FORCE_EDGE_CAP {
        return Err(BruteForceError::TooLarge { edges: edges.len(), cap: BRUTE_FORCE_EDGE_CAP });
    }
    edges.sort_unstable();
    let weights: Vec<u64> = edges.iter().map(|&e| graph.weight(e).unwrap()).collect();

    struct Search<'a> {
        edges: &'a [Edge],
        weights: &'a [u64],
        used: Vec<bool>,
        current: Vec<Edge>,
        best: Vec<Edge>,
        best_weight: u64,
    }

    impl Search<'_> {
        // Edges are visited in sorted order and inclusion is tried first, so
        // the first optimum found is the lexicographically least one.
        fn go(&mut self, k: usize, weight: u64) {
            if k == self.edges.len() {
                if weight > self.best_weight {
                    self.best_weight = weight;
                    self.best = self.current.clone();
                }
                return;
            }
            let remaining: u64 = self.weights[k..].iter().sum();
            if weight + remaining <= self.best_weight && !self.best.is_empty() {
                return;
            }
            let e = self.edges[k];
            if !self.used[e.red.index()] && !self.used[e.blue.index()] {
                self.used[e.red.index()] = true;
                self.used[e.blue.index()] = true;
                self.current.push(e);
                self.go(k + 1, weight + self.weights[k]);
                self.current.pop();
                self.used[e.red.index()] = false;
                self.used[e.blue.index()] = false;
            }
            self.go(k + 1, weight);
        }
    }

    let mut search = Search {
        edges: &edges,
        weights: &weights,
        used: vec![false; graph.node_count()],
        current: Vec::new(),
        best: Vec::new(),
        best_weight: 0,
    };
    search.go(0, 0);
    Ok(Matching::from_edges(search.best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::NodeId as N;

    fn e(r: u32, b: u32) -> Edge {
        Edge::new(N(r), N(b))
    }

    #[test]
    fn reference_small_instances() {
        assert_eq!(
            stable_matching_reference(&instance_p()),
            Matching::from_edges([e(1, 4), e(2, 3)])
        );
        assert_eq!(stable_matching_reference(&single_edge()), Matching::from_edges([e(1, 2)]));
        assert_eq!(
            stable_matching_reference(&aligned_2x2()),
            Matching::from_edges([e(1, 3), e(2, 4)])
        );
    }

    #[test]
    fn greedy_small_instances() {
        let g = p4();
        let m = greedy_matching(&g);
        assert_eq!(m, Matching::from_edges([e(2, 3)]));
        assert_eq!(m.weight(&g), 15);
        let g = instance_p().unit_weights();
        assert_eq!(greedy_matching(&g), Matching::from_edges([e(1, 3)]));
        assert_eq!(greedy_matching(&single_edge()), Matching::from_edges([e(1, 2)]));
    }

    #[test]
    fn brute_force_small_instances() {
        let g = p4();
        let m = max_weight_matching_bruteforce(&g).unwrap();
        assert_eq!(m, Matching::from_edges([e(1, 3), e(2, 4)]));
        assert_eq!(m.weight(&g), 20);
        assert_eq!(
            max_weight_matching_bruteforce(&single_edge()).unwrap(),
            Matching::from_edges([e(1, 2)])
        );
        let g = instance_p().unit_weights();
        let m = max_weight_matching_bruteforce(&g).unwrap();
        assert_eq!(m, Matching::from_edges([e(1, 4), e(2, 3)]));
        assert_eq!(m.weight(&g), 2);
    }

    #[test]
    fn brute_force_prefers_lexicographically_least() {
        // unit-weight 2x2: {1-3, 2-4} and {1-4, 2-3} tie at weight 2
        let g = aligned_2x2();
        assert_eq!(
            max_weight_matching_bruteforce(&g).unwrap(),
            Matching::from_edges([e(1, 3), e(2, 4)])
        );
    }

    #[test]
    fn brute_force_cap() {
        use crate::generate::{generate_random, RandomGraphConfig};
        let g = generate_random(&RandomGraphConfig::new(20, 20, 3, 1)).unwrap();
        assert!(g.edge_count() > BRUTE_FORCE_EDGE_CAP);
        assert!(matches!(
            max_weight_matching_bruteforce(&g),
            Err(BruteForceError::TooLarge { .. })
        ));
    }
}
