//! Truncated distributed Gale-Shapley on bicoloured bounded-degree graphs.
//!
//! Red nodes propose, blue nodes accept or reject. Each synchronous round is
//! one blue turn followed by one red turn, and every node talks to its
//! neighbours only through ports numbered in preference order. Stopping the
//! algorithm after a constant number of rounds already yields an almost
//! stable matching, a (2+ε)-approximate maximum-weight matching, and,
//! combined with random sampling over a preference oracle, a constant-query
//! estimate of the size of the stable matching.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line front end live in the `truncgs` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod engine;
pub mod estimator;
pub mod generate;
pub mod graph;
mod math;
pub mod reference;

pub use analysis::{
    check_lemmas, is_epsilon_stable, lemma6, potential, rounds_for_stability, rounds_for_weight,
    unstable_edges, LemmaReport, LemmaRow, ParamError, Potential,
};
pub use engine::{
    run_rounds, run_to_convergence, Convergence, Engine, EngineFault, Message, MessageCounts,
    MessageKind, RoundRecord, RoundTrace,
};
pub use estimator::{
    estimate_size, estimator_params, extract_ball, matched_in_mj_local, query_budget, Ball,
    Estimate, EstimateReport, EstimatorError, EstimatorParams, GraphOracle, OracleError,
    OracleReply, PreferenceOracle,
};
pub use generate::{generate_random, GenerateError, RandomGraphConfig};
pub use graph::{
    preferences_from_weights, validate, BicolouredGraph, Colour, Edge, GraphError, GraphParts,
    Matching, NodeId, ValidationReport, Violation,
};
pub use reference::{
    greedy_matching, max_weight_matching_bruteforce, stable_matching_reference, BruteForceError,
    BRUTE_FORCE_EDGE_CAP,
};
