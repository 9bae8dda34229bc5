//! Stability, potential and the inequalities that bound them.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::engine::{Engine, RoundTrace};
use crate::graph::{BicolouredGraph, Edge, Matching, NodeId};
use crate::math::ceil_ratio;

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum ParamError {
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("max degree must be at least 1")]
    ZeroDegree,
}

fn partner_ports(graph: &BicolouredGraph, partners: &[Option<NodeId>]) -> Vec<Option<usize>> {
    graph
        .nodes()
        .map(|v| partners[v.index()].map(|p| graph.port_of(v, p).expect("partner is a neighbour")))
        .collect()
}

/// Visits every unstable edge given each node's partner.
///
/// An edge outside the matching is unstable when each endpoint is unmatched
/// or puts the other in a strictly better tie group than its partner.
fn for_each_unstable(
    graph: &BicolouredGraph,
    partners: &[Option<NodeId>],
    mut visit: impl FnMut(Edge),
) {
    let ports = partner_ports(graph, partners);
    let wants = |v: NodeId, port: usize| match ports[v.index()] {
        None => true,
        Some(p) => graph.rank_at(v, port) < graph.rank_at(v, p),
    };
    for r in graph.reds() {
        for (k, &b) in graph.neighbours(r).iter().enumerate() {
            if partners[r.index()] == Some(b) {
                continue;
            }
            if wants(r, k) && wants(b, graph.back_port(r, k)) {
                visit(Edge::new(r, b));
            }
        }
    }
}

pub(crate) fn unstable_count(graph: &BicolouredGraph, partners: &[Option<NodeId>]) -> usize {
    let mut count = 0;
    for_each_unstable(graph, partners, |_| count += 1);
    count
}

/// Edges of `E \ M` whose endpoints would both rather be matched to each other.
pub fn unstable_edges(graph: &BicolouredGraph, matching: &Matching) -> Vec<Edge> {
    let mut out = Vec::new();
    for_each_unstable(graph, &matching.partners(graph), |e| out.push(e));
    out
}

/// At most `ε·|M|` unstable edges. An empty matching qualifies only when nothing is unstable.
pub fn is_epsilon_stable(graph: &BicolouredGraph, matching: &Matching, epsilon: f64) -> bool {
    debug_assert!(epsilon > 0.0);
    let u = unstable_edges(graph, matching).len();
    u as f64 <= epsilon * matching.len() as f64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    /// `f_i(R)`
    pub total: u64,
    /// Number of red nodes with positive potential.
    pub active: u64,
    /// `f_i(r)`, indexed by red node index.
    pub per_red: Vec<u64>,
}

/// `f_i(r)` is the weight towards the head of `C_i(r)` for an unmatched red
/// node with candidates left, and 0 otherwise.
pub fn potential(engine: &Engine<'_>) -> Potential {
    let graph = engine.graph();
    let mut per_red = vec![0; graph.red_count() as usize];
    let mut total = 0;
    let mut active = 0;
    for r in graph.reds() {
        if engine.is_matched(r) {
            continue;
        }
        let remaining = engine.candidates(r).len();
        if remaining > 0 {
            let head_port = graph.degree(r) - remaining;
            let w = graph.weight_at(r, head_port);
            per_red[r.index()] = w;
            total += w;
            active += 1;
        }
    }
    Potential { total, active, per_red }
}

/// Every unstable edge `{r, b}` has `b` still in `C_i(r)` and `r` unmatched.
pub fn unstable_edges_are_pending(engine: &Engine<'_>) -> bool {
    let graph = engine.graph();
    let mut ok = true;
    for_each_unstable(graph, &engine.partners(), |e| {
        ok &= !engine.is_matched(e.red) && engine.candidates(e.red).contains(&e.blue);
    });
    ok
}

/// The potential bounds only hold from round 2 on: after round 1 nothing is
/// matched yet. Round counts from [`rounds_for_stability`] and
/// [`rounds_for_weight`] should be clamped to this before use.
pub const FIRST_BOUNDED_ROUND: usize = 2;

/// Smallest `i >= 1 + Δ(Δ-1)/ε`; after `max(i, 2)` rounds `M_i` is ε-stable.
pub fn rounds_for_stability(max_degree: usize, epsilon: f64) -> Result<usize, ParamError> {
    check_params(max_degree, epsilon)?;
    let d = max_degree as f64;
    Ok(1 + ceil_ratio(d * (d - 1.0), epsilon) as usize)
}

/// Smallest `i >= 1 + (Δ-1)/ε`; after `max(i, 2)` rounds `w(M*) <= (2+ε)·w(M_i)`.
pub fn rounds_for_weight(max_degree: usize, epsilon: f64) -> Result<usize, ParamError> {
    check_params(max_degree, epsilon)?;
    Ok(1 + ceil_ratio(max_degree as f64 - 1.0, epsilon) as usize)
}

fn check_params(max_degree: usize, epsilon: f64) -> Result<(), ParamError> {
    if max_degree == 0 {
        return Err(ParamError::ZeroDegree);
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(ParamError::NonPositiveEpsilon(epsilon));
    }
    Ok(())
}

/// Inequalities evaluated at one round `i >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaRow {
    pub round: usize,
    /// `f_i(R)`
    pub potential: u64,
    /// `f_{i-1}(R)`
    pub prev_potential: u64,
    /// `w(L_i)`
    pub lost_weight: u64,
    /// `w(L_{i-1})`
    pub prev_lost_weight: u64,
    /// `w_i(B)`
    pub blue_weight: u64,
    pub unstable: usize,
    /// `f_i(R)` under unit weights
    pub active_reds: u64,
    /// `f_i(R) <= w(L_i) - w(L_{i-1})`
    pub lemma2: bool,
    /// `f_i(R) <= f_{i-1}(R)`
    pub lemma3: bool,
    /// `w(L_i) >= (i-1) f_i(R)`
    pub lemma4: bool,
    /// `w(L_i) <= (Δ-1) w_i(B)`
    pub lemma5: bool,
    /// `u_i <= Δ f_i(R)` with unit weights
    pub thm1_bound: bool,
}

impl LemmaRow {
    pub fn all_hold(&self) -> bool {
        self.lemma2 && self.lemma3 && self.lemma4 && self.lemma5 && self.thm1_bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub max_degree: usize,
    pub rows: Vec<LemmaRow>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(LemmaRow::all_hold)
    }

    pub fn violations(&self) -> impl Iterator<Item = &LemmaRow> {
        self.rows.iter().filter(|r| !r.all_hold())
    }
}

/// Evaluates the per-round inequalities on every round `i >= 2` of a trace.
pub fn check_lemmas(trace: &RoundTrace, max_degree: usize) -> LemmaReport {
    let delta = max_degree as u64;
    let rows = trace
        .rounds()
        .windows(2)
        .map(|pair| {
            let (prev, cur) = (&pair[0], &pair[1]);
            let i = cur.round as u64;
            LemmaRow {
                round: cur.round,
                potential: cur.potential,
                prev_potential: prev.potential,
                lost_weight: cur.lost_weight,
                prev_lost_weight: prev.lost_weight,
                blue_weight: cur.blue_weight,
                unstable: cur.unstable,
                active_reds: cur.active_reds,
                lemma2: cur.potential + prev.lost_weight <= cur.lost_weight,
                lemma3: cur.potential <= prev.potential,
                lemma4: cur.lost_weight >= (i - 1) * cur.potential,
                lemma5: cur.lost_weight <= delta.saturating_sub(1) * cur.blue_weight,
                thm1_bound: cur.unstable as u64 <= delta * cur.active_reds,
            }
        })
        .collect();
    LemmaReport { max_degree, rows }
}

/// `f_i(R) <= γ·w_i(B)` for every recorded round `i >= max(2, 1 + (Δ-1)/γ)`.
pub fn lemma6(trace: &RoundTrace, max_degree: usize, gamma: f64) -> Vec<(usize, bool)> {
    let from = (1 + ceil_ratio(max_degree as f64 - 1.0, gamma) as usize).max(FIRST_BOUNDED_ROUND);
    trace
        .rounds()
        .iter()
        .filter(|rec| rec.round >= from)
        .map(|rec| (rec.round, rec.potential as f64 <= gamma * rec.blue_weight as f64))
        .collect()
}
