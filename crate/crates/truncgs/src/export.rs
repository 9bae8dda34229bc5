//! CSV and JSON renderings of traces, lemma checks and estimator runs.

use std::fmt::Write as _;

use serde::Serialize;
use truncgs_core::{EstimateReport, LemmaReport, RoundTrace};

pub const TRACE_HEADER: &str =
    "round,m_size,w_blue,f_red,l_size,l_weight,u,msgs_propose,msgs_accept,msgs_reject,msgs_break";

pub fn trace_csv(trace: &RoundTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in trace.rounds() {
        let m = &r.messages;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.round,
            r.matching.len(),
            r.blue_weight,
            r.potential,
            r.lost_count,
            r.lost_weight,
            r.unstable,
            m.propose,
            m.accept,
            m.reject,
            m.breaks
        )
        .unwrap();
    }
    out
}

pub fn lemma_csv(report: &LemmaReport) -> String {
    let mut out = String::from(
        "round,f_red,f_red_prev,l_weight,l_weight_prev,w_blue,u,active_reds,lemma2,lemma3,lemma4,lemma5,thm1_bound\n",
    );
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.round,
            r.potential,
            r.prev_potential,
            r.lost_weight,
            r.prev_lost_weight,
            r.blue_weight,
            r.unstable,
            r.active_reds,
            r.lemma2,
            r.lemma3,
            r.lemma4,
            r.lemma5,
            r.thm1_bound
        )
        .unwrap();
    }
    out
}

/// `u_i / |M_i|` per round; `inf` when `M_i` is empty but edges are unstable.
pub fn instability_ratio(unstable: usize, matched: usize) -> f64 {
    match (unstable, matched) {
        (0, _) => 0.0,
        (_, 0) => f64::INFINITY,
        (u, m) => u as f64 / m as f64,
    }
}

pub fn sweep_csv(trace: &RoundTrace) -> String {
    let mut out = String::from("round,m_size,u,ratio\n");
    for r in trace.rounds() {
        let ratio = instability_ratio(r.unstable, r.matching.len());
        writeln!(out, "{},{},{},{}", r.round, r.matching.len(), r.unstable, ratio).unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fraction {
    pub numerator: u128,
    pub denominator: u128,
}

/// One estimator trial in its JSON shape.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: u64,
    pub max_degree: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
    pub j: usize,
    #[serde(rename = "N")]
    pub samples: u64,
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(rename = "Y")]
    pub y: u64,
    pub m_hat: Option<Fraction>,
    pub m_hat_value: Option<f64>,
    pub queries: u64,
    pub query_budget: u128,
    pub failed: bool,
    pub guaranteed: bool,
    /// `|M_∞|` when the caller computed it.
    pub true_size: Option<usize>,
    /// `|m̂ - |M_∞|| <= ε |M_∞|`
    pub success: Option<bool>,
}

impl EstimateRecord {
    pub fn new(trial: u64, seed: u64, report: &EstimateReport, budget: u128, true_size: Option<usize>) -> Self {
        let p = &report.params;
        let success = true_size.map(|m| match report.estimate {
            None => false,
            Some(est) => within_epsilon(est.numerator, est.denominator, m as u128, p.epsilon),
        });
        EstimateRecord {
            trial,
            seed,
            n: report.n,
            max_degree: p.max_degree,
            epsilon: p.epsilon,
            delta: p.delta,
            gamma: p.gamma,
            j: p.rounds,
            samples: p.samples,
            x: report.x,
            y: report.y,
            m_hat: report.estimate.map(|e| Fraction { numerator: e.numerator, denominator: e.denominator }),
            m_hat_value: report.estimate.map(|e| e.to_f64()),
            queries: report.queries,
            query_budget: budget,
            failed: report.failed(),
            guaranteed: p.guaranteed,
            true_size,
            success,
        }
    }
}

/// `|a/b - m| <= ε m`. The product `ε·b·m` is formed in floating point only
/// when the exact integer comparison cannot decide.
pub fn within_epsilon(numerator: u128, denominator: u128, target: u128, epsilon: f64) -> bool {
    let bm = denominator * target;
    let diff = numerator.abs_diff(bm);
    // exact for dyadic ε such as 1, 1/2, 1/4
    diff as f64 <= epsilon * bm as f64
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use truncgs_core::{check_lemmas, run_to_convergence, BicolouredGraph, GraphParts, NodeId};

    fn instance_p() -> BicolouredGraph {
        let ids = |v: &[u32]| v.iter().copied().map(NodeId).collect::<Vec<_>>();
        BicolouredGraph::new(GraphParts {
            red_count: 2,
            blue_count: 2,
            adjacency: vec![ids(&[3, 4]), ids(&[3]), ids(&[2, 1]), ids(&[1])],
            weights: None,
            ties: None,
        })
        .unwrap()
    }

    #[test]
    fn trace_rows_for_instance_p() {
        let g = instance_p();
        let conv = run_to_convergence(&g).unwrap();
        let csv = trace_csv(&conv.trace);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        // round 1: both reds propose to 3, nothing is matched yet
        assert_eq!(lines[1], "1,0,0,2,0,0,3,2,0,0,0");
        // round 2: 3 keeps 2 and rejects 1, which drops {1,3} and proposes to 4
        assert_eq!(lines[2], "2,1,1,1,1,1,1,1,1,1,0");
        assert_eq!(lines[3], "3,2,2,0,1,1,0,0,1,0,0");
        assert_eq!(lines.len(), 1 + conv.trace.len());
    }

    #[test]
    fn lemma_and_sweep_csv_shapes() {
        let g = instance_p();
        let conv = run_to_convergence(&g).unwrap();
        let lemma = lemma_csv(&check_lemmas(&conv.trace, g.max_degree()));
        assert_eq!(lemma.lines().count(), conv.trace.len());
        assert!(lemma.lines().skip(1).all(|l| l.ends_with("true,true,true,true,true")));
        let sweep = sweep_csv(&conv.trace);
        assert_eq!(sweep.lines().nth(1), Some("1,0,3,inf"));
    }

    #[test]
    fn ratio_edge_cases() {
        assert_eq!(instability_ratio(0, 0), 0.0);
        assert!(instability_ratio(2, 0).is_infinite());
        assert_eq!(instability_ratio(1, 4), 0.25);
    }

    #[test]
    fn epsilon_window_is_inclusive() {
        // 3/1 vs 2 with ε = 1/2: |3 - 2| = 1 = ε·2
        assert!(within_epsilon(3, 1, 2, 0.5));
        assert!(!within_epsilon(7, 2, 2, 0.5));
        assert!(within_epsilon(0, 1, 0, 0.5));
    }
}
