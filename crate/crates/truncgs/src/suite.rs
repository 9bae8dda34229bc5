//! Seeded instance families shared by `verify --random` and the acceptance run.
//!
//! Instance `k` of a family depends only on `(seed, k)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use truncgs_core::{generate_random, BicolouredGraph, RandomGraphConfig, BRUTE_FORCE_EDGE_CAP};

pub const EPSILONS: [f64; 3] = [0.25, 0.5, 1.0];

/// Mixes a base seed with an index (splitmix64 finaliser).
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub index: u64,
    pub config: RandomGraphConfig,
    pub graph: BicolouredGraph,
    pub epsilon: f64,
}

/// Δ cycles through 2..=5, n is log-uniform in [20, 2000], about half the
/// nodes are red. Odd instances are weighted and every third has ties.
pub fn mixed_instance(seed: u64, index: u64) -> Instance {
    build(seed, index, true)
}

/// As [`mixed_instance`] but always strict.
pub fn strict_instance(seed: u64, index: u64) -> Instance {
    build(seed, index, false)
}

fn build(seed: u64, index: u64, allow_ties: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, index));
    let max_degree = 2 + (index % 4) as u32;
    let n = (20f64.ln() + rng.gen::<f64>() * (2000f64.ln() - 20f64.ln())).exp().round() as u32;
    let red = ((n as f64) * rng.gen_range(0.4..=0.6)).round().clamp(1.0, n as f64 - 1.0) as u32;
    let config = RandomGraphConfig::new(red, n - red, max_degree, rng.gen())
        .weighted(index % 2 == 1)
        .ties(allow_ties && index.is_multiple_of(3));
    let graph = generate_random(&config).expect("red share keeps every family member feasible");
    let epsilon = EPSILONS[(index / 4 % 3) as usize];
    Instance { index, config, graph, epsilon }
}

/// Weighted graphs with at most [`BRUTE_FORCE_EDGE_CAP`] edges; ε alternates
/// between 1/2 and 1.
pub fn small_weighted_instance(seed: u64, index: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, index));
    loop {
        let max_degree = rng.gen_range(2..=5);
        let config =
            RandomGraphConfig::new(rng.gen_range(1..=8), rng.gen_range(1..=8), max_degree, rng.gen()).weighted(true);
        let Ok(graph) = generate_random(&config) else { continue };
        if graph.edge_count() <= BRUTE_FORCE_EDGE_CAP {
            let epsilon = if index.is_multiple_of(2) { 0.5 } else { 1.0 };
            return Instance { index, config, graph, epsilon };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_reproducible_and_in_range() {
        for k in 0..40 {
            let a = mixed_instance(5, k);
            assert_eq!(a.graph, mixed_instance(5, k).graph);
            let n = a.graph.node_count();
            assert!((20..=2000).contains(&n), "n = {n}");
            assert!(a.graph.max_degree() <= 5);
            assert!(!strict_instance(5, k).graph.has_ties());
            assert!(small_weighted_instance(5, k).graph.edge_count() <= BRUTE_FORCE_EDGE_CAP);
        }
        assert_ne!(sub_seed(1, 0), sub_seed(1, 1));
        assert_ne!(sub_seed(1, 0), sub_seed(2, 0));
    }
}
