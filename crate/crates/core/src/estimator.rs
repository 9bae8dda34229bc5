//! Constant-query estimate of the stable matching size.
//!
//! A red node's state after `j` rounds depends only on the preferences of
//! nodes within distance `2j`, since every round moves information at most
//! two hops (red to blue and back). So whether a sampled red node is matched
//! in `M_j` can be decided by exploring its radius-`2j` ball through the
//! oracle and simulating the ball alone. Sampling colours gives `|R|/n`,
//! sampling red nodes gives `|M_j|/|R|`, and `|M_j|` is within a factor
//! `1 + ε/2` of `|M_∞|`.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::engine::{Engine, EngineFault};
use crate::graph::{BicolouredGraph, Colour, GraphParts, NodeId};
use crate::math;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReply {
    pub colour: Colour,
    /// Neighbours in preference order.
    pub neighbours: Vec<NodeId>,
    /// Tie group of each neighbour: nondecreasing, equal values are tied.
    pub groups: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle has no node {0}")]
    UnknownNode(NodeId),
    #[error("oracle unavailable: {0}")]
    Unavailable(String),
}

/// Black-box access to a node's colour and preference list.
pub trait PreferenceOracle {
    fn query(&mut self, v: NodeId) -> Result<OracleReply, OracleError>;

    /// Number of calls to [`PreferenceOracle::query`] so far.
    fn query_count(&self) -> u64;
}

/// Oracle answering from an in-memory graph.
#[derive(Clone, Debug)]
pub struct GraphOracle<'g> {
    graph: &'g BicolouredGraph,
    queries: u64,
}

impl<'g> GraphOracle<'g> {
    pub fn new(graph: &'g BicolouredGraph) -> Self {
        GraphOracle { graph, queries: 0 }
    }
}

impl PreferenceOracle for GraphOracle<'_> {
    fn query(&mut self, v: NodeId) -> Result<OracleReply, OracleError> {
        self.queries += 1;
        if !self.graph.contains(v) {
            return Err(OracleError::UnknownNode(v));
        }
        let neighbours = self.graph.neighbours(v).to_vec();
        let groups = (0..neighbours.len()).map(|k| self.graph.rank_at(v, k)).collect();
        Ok(OracleReply { colour: self.graph.colour(v), neighbours, groups })
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}

impl<O: PreferenceOracle + ?Sized> PreferenceOracle for &mut O {
    fn query(&mut self, v: NodeId) -> Result<OracleReply, OracleError> {
        (**self).query(v)
    }

    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EstimatorError {
    #[error("max degree must be at least 3, got {0}")]
    DegreeTooSmall(usize),
    #[error("epsilon must lie in (0, 1], got {0}")]
    EpsilonOutOfRange(f64),
    #[error("delta must lie in (0, 1/2], got {0}")]
    DeltaOutOfRange(f64),
    #[error("node count must be positive")]
    NoNodes,
    #[error("sample size must be positive")]
    NoSamples,
    #[error("node {0} is not red")]
    NotRed(NodeId),
    #[error("oracle is inconsistent around node {node}: {reason}")]
    InconsistentOracle { node: NodeId, reason: &'static str },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Engine(#[from] EngineFault),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallNode {
    pub id: NodeId,
    pub colour: Colour,
    pub distance: usize,
    /// In-ball neighbours in preference order. Only nodes at the full radius
    /// can have lost neighbours here.
    pub neighbours: Vec<NodeId>,
    /// Tie group per neighbour, as reported by the oracle.
    pub groups: Vec<u32>,
}

/// The nodes within some radius of a centre, as seen through the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub center: NodeId,
    pub radius: usize,
    /// Breadth-first order; the centre comes first.
    pub nodes: Vec<BallNode>,
    /// Oracle calls made to build the ball: one per node.
    pub queries: u64,
}

/// The ball as a stand-alone graph with fresh ids.
#[derive(Clone, Debug)]
pub struct LocalGraph {
    pub graph: BicolouredGraph,
    /// Original id of every local node, indexed by local index.
    pub original: Vec<NodeId>,
    pub center: NodeId,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.iter().any(|n| n.id == v)
    }

    /// Relabels the ball as a graph (reds first, breadth-first order within a
    /// colour). Returns `None` for a radius-0 ball, which is a lone node.
    pub fn to_graph(&self) -> Option<LocalGraph> {
        if self.radius == 0 {
            return None;
        }
        let reds: Vec<&BallNode> = self.nodes.iter().filter(|n| n.colour == Colour::Red).collect();
        let blues: Vec<&BallNode> = self.nodes.iter().filter(|n| n.colour == Colour::Blue).collect();
        let mut local: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let mut original = Vec::with_capacity(self.nodes.len());
        for (k, node) in reds.iter().chain(blues.iter()).enumerate() {
            local.insert(node.id, NodeId::from_index(k));
            original.push(node.id);
        }
        let adjacency = reds
            .iter()
            .chain(blues.iter())
            .map(|node| node.neighbours.iter().map(|u| local[u]).collect())
            .collect();
        let ties: Vec<Vec<bool>> = reds
            .iter()
            .chain(blues.iter())
            .map(|node| (0..node.groups.len()).map(|k| k > 0 && node.groups[k] == node.groups[k - 1]).collect())
            .collect();
        let any_tie = ties.iter().flatten().any(|&t| t);
        let parts = GraphParts {
            red_count: reds.len() as u32,
            blue_count: blues.len() as u32,
            adjacency,
            weights: None,
            ties: any_tie.then_some(ties),
        };
        let graph = BicolouredGraph::new(parts).ok()?;
        Some(LocalGraph { graph, original, center: local[&self.center] })
    }
}

/// Breadth-first exploration of the radius-`radius` ball around `center`.
/// Each node in the ball is queried exactly once.
pub fn extract_ball<O: PreferenceOracle + ?Sized>(
    oracle: &mut O,
    center: NodeId,
    radius: usize,
) -> Result<Ball, EstimatorError> {
    let mut index: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut nodes: Vec<BallNode> = Vec::new();
    let mut queries = 0u64;
    let mut fetch = |oracle: &mut O, v: NodeId, distance: usize| -> Result<BallNode, EstimatorError> {
        queries += 1;
        let reply = oracle.query(v)?;
        let mut seen = reply.neighbours.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(EstimatorError::InconsistentOracle { node: v, reason: "repeated neighbour" });
        }
        if reply.groups.len() != reply.neighbours.len() || reply.groups.windows(2).any(|w| w[0] > w[1]) {
            return Err(EstimatorError::InconsistentOracle { node: v, reason: "malformed tie groups" });
        }
        Ok(BallNode { id: v, colour: reply.colour, distance, neighbours: reply.neighbours, groups: reply.groups })
    };

    nodes.push(fetch(oracle, center, 0)?);
    index.insert(center, 0);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(k) = queue.pop_front() {
        if nodes[k].distance == radius {
            continue;
        }
        let (id, colour, distance) = (nodes[k].id, nodes[k].colour, nodes[k].distance);
        for i in 0..nodes[k].neighbours.len() {
            let u = nodes[k].neighbours[i];
            if index.contains_key(&u) {
                continue;
            }
            let node = fetch(oracle, u, distance + 1)?;
            if node.colour == colour {
                return Err(EstimatorError::InconsistentOracle { node: id, reason: "same colour neighbours" });
            }
            index.insert(u, nodes.len());
            queue.push_back(nodes.len());
            nodes.push(node);
        }
    }

    // Boundary nodes keep only the neighbours that made it into the ball.
    for node in nodes.iter_mut().filter(|n| n.distance == radius) {
        let (kept, groups) = node
            .neighbours
            .iter()
            .zip(&node.groups)
            .filter(|(u, _)| index.contains_key(u))
            .unzip();
        node.neighbours = kept;
        node.groups = groups;
    }
    for node in &nodes {
        for u in &node.neighbours {
            let other = &nodes[index[u]];
            if other.colour == node.colour {
                return Err(EstimatorError::InconsistentOracle { node: node.id, reason: "same colour neighbours" });
            }
            if !other.neighbours.contains(&node.id) {
                return Err(EstimatorError::InconsistentOracle { node: node.id, reason: "asymmetric adjacency" });
            }
        }
    }

    Ok(Ball { center, radius, nodes, queries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalStatus {
    pub matched: bool,
    pub queries: u64,
}

/// Decides whether red node `red` is matched in `M_j` from its radius-`2j` ball alone.
pub fn matched_in_mj_local<O: PreferenceOracle + ?Sized>(
    oracle: &mut O,
    red: NodeId,
    rounds: usize,
) -> Result<LocalStatus, EstimatorError> {
    let ball = extract_ball(oracle, red, 2 * rounds)?;
    if ball.nodes[0].colour != Colour::Red {
        return Err(EstimatorError::NotRed(red));
    }
    let local = ball.to_graph().ok_or(EstimatorError::InconsistentOracle {
        node: red,
        reason: "ball is not a valid graph",
    })?;
    let mut engine = Engine::new(&local.graph);
    for _ in 0..rounds {
        engine.step()?;
    }
    Ok(LocalStatus { matched: engine.is_matched(local.center), queries: ball.queries })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorParams {
    /// Δ
    pub max_degree: usize,
    /// ε
    pub epsilon: f64,
    /// δ
    pub delta: f64,
    /// `γ = ε / (8Δ)`
    pub gamma: f64,
    /// `j`: rounds simulated around each sampled red node
    pub rounds: usize,
    /// `N`: sample size in each phase
    pub samples: u64,
    /// `N₀ = 6(Δ+1)/γ² · ln(6/δ)`
    pub min_samples: f64,
    /// False when `samples` was overridden below `N₀`.
    pub guaranteed: bool,
}

fn check_estimator_inputs(max_degree: usize, epsilon: f64, delta: f64) -> Result<(), EstimatorError> {
    if max_degree < 3 {
        return Err(EstimatorError::DegreeTooSmall(max_degree));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(EstimatorError::EpsilonOutOfRange(epsilon));
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(EstimatorError::DeltaOutOfRange(delta));
    }
    Ok(())
}

/// Smallest `j >= 1 + (2Δ-2)/ε` and smallest `N >= N₀`.
pub fn estimator_params(max_degree: usize, epsilon: f64, delta: f64) -> Result<EstimatorParams, EstimatorError> {
    check_estimator_inputs(max_degree, epsilon, delta)?;
    let d = max_degree as f64;
    let gamma = epsilon / (8.0 * d);
    let rounds = 1 + math::ceil_ratio(2.0 * d - 2.0, epsilon) as usize;
    let min_samples = 6.0 * (d + 1.0) / (gamma * gamma) * math::ln(6.0 / delta);
    let samples = math::ceil(min_samples) as u64;
    Ok(EstimatorParams { max_degree, epsilon, delta, gamma, rounds, samples, min_samples, guaranteed: true })
}

impl EstimatorParams {
    /// Same `γ` and `j` but a caller-chosen sample size; the accuracy
    /// guarantee only holds when `samples >= N₀`.
    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self.guaranteed = samples as f64 >= self.min_samples;
        self
    }
}

/// `25000 ε⁻² (Δ-1)^(3+4Δ/ε) ln δ⁻¹`, rounded down; saturates at `u128::MAX`.
pub fn query_budget(max_degree: usize, epsilon: f64, delta: f64) -> Result<u128, EstimatorError> {
    check_estimator_inputs(max_degree, epsilon, delta)?;
    let d = max_degree as f64;
    let bound = 25000.0 / (epsilon * epsilon)
        * math::pow(d - 1.0, 3.0 + 4.0 * d / epsilon)
        * math::ln(1.0 / delta);
    Ok(math::floor(bound) as u128)
}

/// Exact rational `numerator / denominator` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Estimate {
    pub numerator: u128,
    pub denominator: u128,
}

impl Estimate {
    pub fn new(numerator: u128, denominator: u128) -> Self {
        let g = math::gcd(numerator, denominator).max(1);
        Estimate { numerator: numerator / g, denominator: denominator / g }
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `|self - target| <= tolerance · target`, in exact arithmetic.
    pub fn within(self, target: u64, tolerance_num: u64, tolerance_den: u64) -> bool {
        // |a/b - t| <= (p/q) t  <=>  q|a - b t| <= p b t
        let bt = self.denominator * target as u128;
        let diff = self.numerator.abs_diff(bt);
        tolerance_den as u128 * diff <= tolerance_num as u128 * bt
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub n: u64,
    pub params: EstimatorParams,
    /// Red nodes among the colour-phase samples.
    pub x: u64,
    /// Sampled red nodes matched in `M_j`.
    pub y: u64,
    /// Red nodes obtained in the red-sampling phase.
    pub reds_found: u64,
    /// Draws made in the red-sampling phase.
    pub red_phase_draws: u64,
    /// `n·X·Y / N²`, absent on failure.
    pub estimate: Option<Estimate>,
    pub queries: u64,
}

impl EstimateReport {
    pub fn failed(&self) -> bool {
        self.estimate.is_none()
    }
}

/// Samples nodes uniformly with replacement from `1..=n`.
///
/// Phase one draws `N` nodes and counts red ones (`X`). Phase two draws up to
/// `2(Δ+1)N` nodes and keeps the first `N` red ones, failing if there are not
/// enough. Phase three counts how many of those are matched in `M_j` (`Y`).
pub fn estimate_size<O, R>(
    oracle: &mut O,
    n: u64,
    params: &EstimatorParams,
    rng: &mut R,
) -> Result<EstimateReport, EstimatorError>
where
    O: PreferenceOracle + ?Sized,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(EstimatorError::NoNodes);
    }
    if params.samples == 0 {
        return Err(EstimatorError::NoSamples);
    }
    let n32 = u32::try_from(n).expect("node ids are 32-bit");
    let samples = params.samples;
    let mut queries = 0u64;
    let draw = |rng: &mut R| NodeId(rng.gen_range(1..=n32));

    let mut x = 0u64;
    for _ in 0..samples {
        let v = draw(rng);
        queries += 1;
        if oracle.query(v)?.colour == Colour::Red {
            x += 1;
        }
    }

    let max_draws = 2 * (params.max_degree as u64 + 1) * samples;
    let mut reds = Vec::with_capacity(samples as usize);
    let mut red_phase_draws = 0u64;
    while (reds.len() as u64) < samples && red_phase_draws < max_draws {
        let v = draw(rng);
        red_phase_draws += 1;
        queries += 1;
        if oracle.query(v)?.colour == Colour::Red {
            reds.push(v);
        }
    }
    let reds_found = reds.len() as u64;
    let mut report = EstimateReport {
        n,
        params: *params,
        x,
        y: 0,
        reds_found,
        red_phase_draws,
        estimate: None,
        queries,
    };
    if reds_found < samples {
        return Ok(report);
    }

    for r in reds {
        let status = matched_in_mj_local(oracle, r, params.rounds)?;
        report.queries += status.queries;
        if status.matched {
            report.y += 1;
        }
    }
    let n_sq = samples as u128 * samples as u128;
    report.estimate = Some(Estimate::new(n as u128 * report.x as u128 * report.y as u128, n_sq));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run_rounds;
    use crate::generate::{generate_random, RandomGraphConfig};
    use crate::graph::fixtures::*;
    use crate::graph::NodeId as N;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn params_for_delta3_eps1_delta_half() {
        let p = estimator_params(3, 1.0, 0.5).unwrap();
        assert_eq!(p.gamma, 1.0 / 24.0);
        assert_eq!(p.rounds, 5);
        assert!(p.rounds as f64 <= 2.0 * 3.0 / 1.0);
        // 13824 · ln 12 = 34351.35...
        assert!((p.min_samples - 13824.0 * 12f64.ln()).abs() < 1e-6);
        assert_eq!(p.samples, 34352);
        assert!((p.samples as f64) <= 6250.0 * 8.0 * 2f64.ln());
        assert!(p.guaranteed);
    }

    #[test]
    fn params_reject_out_of_range() {
        assert_eq!(estimator_params(2, 1.0, 0.5), Err(EstimatorError::DegreeTooSmall(2)));
        assert_eq!(estimator_params(3, 1.5, 0.5), Err(EstimatorError::EpsilonOutOfRange(1.5)));
        assert_eq!(estimator_params(3, 0.0, 0.5), Err(EstimatorError::EpsilonOutOfRange(0.0)));
        assert_eq!(estimator_params(3, 1.0, 0.6), Err(EstimatorError::DeltaOutOfRange(0.6)));
        assert!(query_budget(2, 1.0, 0.5).is_err());
    }

    #[test]
    fn params_within_caps() {
        for delta in 3..=6usize {
            for &eps in &[0.25, 0.5, 0.75, 1.0] {
                for &dl in &[0.01, 0.1, 0.5] {
                    let p = estimator_params(delta, eps, dl).unwrap();
                    let d = delta as f64;
                    assert!(p.gamma < 1.0);
                    assert!(p.rounds as f64 >= 1.0 + (2.0 * d - 2.0) / eps);
                    assert!(p.rounds as f64 <= 2.0 * d / eps);
                    assert!(p.samples as f64 >= p.min_samples);
                    let cap = 6250.0 * (d - 1.0).powi(3) / (eps * eps) * (1.0 / dl).ln();
                    assert!((p.samples as f64) <= cap);
                }
            }
        }
    }

    #[test]
    fn budget_delta3_eps1() {
        let b = query_budget(3, 1.0, 0.5).unwrap();
        let expected = (25000.0 * 32768.0 * 2f64.ln()).floor() as u128;
        assert_eq!(b, expected);
        assert_eq!(b, 567_826_170);
        // N + 2(Δ+1)N + 3(Δ-1)^(2j) N <= 4 (Δ-1)^(2j) N <= budget
        let n = 34352u128;
        let ball = 3 * 1024;
        assert!(n + 8 * n + ball * n <= 4 * 1024 * n);
        assert!(4 * 1024 * n <= b);
    }

    #[test]
    fn budget_grows_when_epsilon_halves() {
        for delta in 3..=5usize {
            let a = query_budget(delta, 1.0, 0.25).unwrap() as f64;
            let b = query_budget(delta, 0.5, 0.25).unwrap() as f64;
            let factor = 4.0 * ((delta - 1) as f64).powf(2.0 * delta as f64 / 1.0);
            assert!(b >= factor * a * (1.0 - 1e-12));
        }
    }

    #[test]
    fn ball_radius_two_on_instance_p() {
        let g = instance_p();
        let mut oracle = GraphOracle::new(&g);
        let ball = extract_ball(&mut oracle, N(1), 2).unwrap();
        assert_eq!(ball.len(), 4);
        assert_eq!(ball.queries, 4);
        assert_eq!(oracle.query_count(), 4);
        let dist: Vec<(NodeId, usize)> = ball.nodes.iter().map(|n| (n.id, n.distance)).collect();
        assert_eq!(dist, alloc::vec![(N(1), 0), (N(3), 1), (N(4), 1), (N(2), 2)]);
    }

    #[test]
    fn ball_radius_zero() {
        let g = instance_p();
        let mut oracle = GraphOracle::new(&g);
        let ball = extract_ball(&mut oracle, N(3), 0).unwrap();
        assert_eq!(ball.len(), 1);
        assert_eq!(oracle.query_count(), 1);
        assert!(ball.to_graph().is_none());
    }

    #[test]
    fn ball_size_bound_delta3() {
        for seed in 0..20 {
            let g = generate_random(&RandomGraphConfig::new(40, 40, 3, seed)).unwrap();
            let mut oracle = GraphOracle::new(&g);
            let ball = extract_ball(&mut oracle, N(1), 4).unwrap();
            assert!(ball.queries <= 46);
            assert!(ball.queries < 48);
            assert_eq!(ball.queries, ball.len() as u64);
        }
    }

    #[test]
    fn boundary_lists_are_truncated() {
        let g = generate_random(&RandomGraphConfig::new(60, 60, 4, 3)).unwrap();
        let mut oracle = GraphOracle::new(&g);
        let ball = extract_ball(&mut oracle, N(5), 3).unwrap();
        for node in &ball.nodes {
            if node.distance < 3 {
                assert_eq!(node.neighbours.as_slice(), g.neighbours(node.id));
            } else {
                let kept: Vec<NodeId> =
                    g.neighbours(node.id).iter().copied().filter(|u| ball.contains(*u)).collect();
                assert_eq!(node.neighbours, kept);
            }
        }
    }

    struct Lying<'g>(GraphOracle<'g>);

    impl PreferenceOracle for Lying<'_> {
        fn query(&mut self, v: NodeId) -> Result<OracleReply, OracleError> {
            let mut reply = self.0.query(v)?;
            if v == N(2) {
                reply.neighbours.clear();
                reply.groups.clear();
            }
            Ok(reply)
        }

        fn query_count(&self) -> u64 {
            self.0.query_count()
        }
    }

    #[test]
    fn asymmetric_oracle_is_a_fault() {
        let g = instance_p();
        let mut oracle = Lying(GraphOracle::new(&g));
        let err = extract_ball(&mut oracle, N(1), 3).unwrap_err();
        assert!(matches!(err, EstimatorError::InconsistentOracle { reason: "asymmetric adjacency", .. }));
    }

    #[test]
    fn local_status_instance_p() {
        let g = instance_p();
        let mut oracle = GraphOracle::new(&g);
        assert!(matched_in_mj_local(&mut oracle, N(2), 2).unwrap().matched);
        assert!(!matched_in_mj_local(&mut oracle, N(1), 2).unwrap().matched);
        assert!(matched_in_mj_local(&mut oracle, N(1), 3).unwrap().matched);
        assert_eq!(matched_in_mj_local(&mut oracle, N(3), 2), Err(EstimatorError::NotRed(N(3))));
    }

    #[test]
    fn local_status_mutual_first_choice() {
        let g = single_edge();
        let mut oracle = GraphOracle::new(&g);
        assert!(!matched_in_mj_local(&mut oracle, N(1), 1).unwrap().matched);
        for j in 2..5 {
            assert!(matched_in_mj_local(&mut oracle, N(1), j).unwrap().matched);
        }
    }

    #[test]
    fn local_matches_global_small() {
        for seed in 0..30u64 {
            let g = generate_random(&RandomGraphConfig::new(25, 20, 4, seed)).unwrap();
            let j = 1 + (seed as usize % 4);
            let trace = run_rounds(&g, j).unwrap();
            let global = &trace.last().unwrap().matching;
            let mut oracle = GraphOracle::new(&g);
            for r in g.reds() {
                let local = matched_in_mj_local(&mut oracle, r, j).unwrap().matched;
                let matched = global.edges().iter().any(|e| e.red == r);
                assert_eq!(local, matched, "seed {seed} red {r} j {j}");
            }
        }
    }

    fn perfect_matching_graph(pairs: u32) -> BicolouredGraph {
        let adjacency = (1..=pairs)
            .map(|r| alloc::vec![N(r + pairs)])
            .chain((1..=pairs).map(|r| alloc::vec![N(r)]))
            .collect();
        BicolouredGraph::new(GraphParts {
            red_count: pairs,
            blue_count: pairs,
            adjacency,
            weights: None,
            ties: None,
        })
        .unwrap()
    }

    #[test]
    fn perfect_matching_forces_y_equal_n() {
        let g = perfect_matching_graph(10);
        let params = estimator_params(3, 1.0, 0.5).unwrap().with_samples(400);
        assert!(!params.guaranteed);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut oracle = GraphOracle::new(&g);
        let report = estimate_size(&mut oracle, 20, &params, &mut rng).unwrap();
        assert_eq!(report.y, 400);
        let est = report.estimate.unwrap();
        assert_eq!(est, Estimate::new(20 * report.x as u128, 400));
        assert!(est.within(10, 1, 4));
        assert_eq!(report.queries, oracle.query_count());
    }

    #[test]
    fn instance_p_estimate_concentrates() {
        let g = instance_p();
        let params = estimator_params(3, 1.0, 0.5).unwrap().with_samples(2000);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut oracle = GraphOracle::new(&g);
        let report = estimate_size(&mut oracle, 4, &params, &mut rng).unwrap();
        assert_eq!(report.y, 2000);
        assert!((report.estimate.unwrap().to_f64() - 2.0).abs() < 0.2);
        assert_eq!(report.queries, oracle.query_count());
    }

    #[test]
    fn failure_when_no_reds_turn_up() {
        // A star with one red centre breaks the degree precondition, so red
        // nodes are too rare for the red-sampling phase to find N of them.
        let g = generate_random(&RandomGraphConfig::new(1, 9, 9, 0)).unwrap();
        let params = estimator_params(3, 1.0, 0.5).unwrap().with_samples(200);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut oracle = GraphOracle::new(&g);
        let report = estimate_size(&mut oracle, 10, &params, &mut rng).unwrap();
        assert!(report.failed());
        assert!(report.reds_found < 200);
        assert_eq!(report.red_phase_draws, 2 * 4 * 200);
        assert_eq!(report.queries, 200 + 1600);
        assert_eq!(report.queries, oracle.query_count());
    }

    #[test]
    fn estimate_is_deterministic() {
        let g = generate_random(&RandomGraphConfig::new(30, 30, 3, 4)).unwrap();
        let params = estimator_params(3, 1.0, 0.5).unwrap().with_samples(100);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            estimate_size(&mut GraphOracle::new(&g), 60, &params, &mut rng).unwrap()
        };
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn estimate_within() {
        let e = Estimate::new(21, 10);
        assert!(e.within(2, 1, 20));
        assert!(!e.within(2, 1, 21));
        assert_eq!(Estimate::new(6, 4), Estimate { numerator: 3, denominator: 2 });
    }
}
