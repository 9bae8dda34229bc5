//! Command implementations behind the CLI. Each returns data; printing and
//! exit codes are left to `main`.

use std::io;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use truncgs_core::analysis::FIRST_BOUNDED_ROUND;
use truncgs_core::{
    check_lemmas, estimate_size, estimator_params, generate_random, lemma6, max_weight_matching_bruteforce,
    query_budget, rounds_for_stability, rounds_for_weight, run_rounds, run_to_convergence, BicolouredGraph,
    BruteForceError, EngineFault, EstimatorError, EstimatorParams, GenerateError, ParamError, PreferenceOracle,
    RandomGraphConfig, RoundTrace, BRUTE_FORCE_EDGE_CAP,
};

use crate::export::{instability_ratio, EstimateRecord};
use crate::format::{self, FormatError};
use crate::suite::sub_seed;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Engine(#[from] EngineFault),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    BruteForce(#[from] BruteForceError),
    #[error("{0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn read_graph(path: &Path) -> Result<BicolouredGraph> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    format::parse(&text).map_err(|source| CliError::Format { path: path.into(), source })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    let io_err = |source| CliError::Io { path: path.into(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphSummary {
    pub max_degree: usize,
    pub red_count: u32,
    pub blue_count: u32,
    pub edge_count: usize,
}

impl GraphSummary {
    pub fn of(graph: &BicolouredGraph) -> Self {
        GraphSummary {
            max_degree: graph.max_degree(),
            red_count: graph.red_count(),
            blue_count: graph.blue_count(),
            edge_count: graph.edge_count(),
        }
    }
}

impl std::fmt::Display for GraphSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "max_degree={} reds={} blues={} edges={}",
            self.max_degree, self.red_count, self.blue_count, self.edge_count
        )
    }
}

pub fn generate(config: &RandomGraphConfig) -> Result<(String, GraphSummary)> {
    let graph = generate_random(config)?;
    Ok((format::serialize(&graph), GraphSummary::of(&graph)))
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub trace: RoundTrace,
    /// First round without Reject or Break, when run to convergence.
    pub convergence_round: Option<usize>,
}

impl RunOutcome {
    /// `u_i / |M_i|` at the last round.
    pub fn epsilon_achieved(&self) -> f64 {
        self.trace.last().map_or(0.0, |r| instability_ratio(r.unstable, r.matching.len()))
    }
}

pub fn run(graph: &BicolouredGraph, rounds: Option<usize>) -> Result<RunOutcome> {
    match rounds {
        Some(i) => Ok(RunOutcome { trace: run_rounds(graph, i)?, convergence_round: None }),
        None => {
            let conv = run_to_convergence(graph)?;
            Ok(RunOutcome { convergence_round: Some(conv.round), trace: conv.trace })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyMode {
    Stability,
    Weight,
    Lemmas,
}

/// Round used for the bound checks: the formula value, but never before
/// the first round that can have a nonempty matching.
pub fn stability_round(max_degree: usize, epsilon: f64) -> Result<usize> {
    Ok(rounds_for_stability(max_degree, epsilon)?.max(FIRST_BOUNDED_ROUND))
}

pub fn weight_round(max_degree: usize, epsilon: f64) -> Result<usize> {
    Ok(rounds_for_weight(max_degree, epsilon)?.max(FIRST_BOUNDED_ROUND))
}

/// `u_i <= ε |M_i|` at `i = rounds_for_stability`. Returns a description of
/// the failure, if any.
pub fn check_stability(graph: &BicolouredGraph, epsilon: f64) -> Result<Option<String>> {
    let i = stability_round(graph.max_degree(), epsilon)?;
    let trace = run_rounds(graph, i)?;
    let rec = trace.last().expect("at least one round");
    let ok = rec.unstable as f64 <= epsilon * rec.matching.len() as f64;
    Ok((!ok).then(|| format!("round {i}: u={} > {epsilon}*|M|={}", rec.unstable, rec.matching.len())))
}

/// `w(M*) <= (2+ε) w(M_i)` at `i = rounds_for_weight`.
pub fn check_weight(graph: &BicolouredGraph, epsilon: f64) -> Result<Option<String>> {
    if graph.edge_count() > BRUTE_FORCE_EDGE_CAP {
        return Err(CliError::Refused(format!(
            "weight mode needs an exact optimum; {} edges exceeds the limit of {BRUTE_FORCE_EDGE_CAP}",
            graph.edge_count()
        )));
    }
    let i = weight_round(graph.max_degree(), epsilon)?;
    let w_i = run_rounds(graph, i)?.last().expect("at least one round").blue_weight;
    let opt = max_weight_matching_bruteforce(graph)?.weight(graph);
    let ok = opt as f64 <= (2.0 + epsilon) * w_i as f64;
    Ok((!ok).then(|| format!("round {i}: w(M*)={opt} > (2+{epsilon})*{w_i}")))
}

/// Lemma inequalities on every round up to convergence, plus the `γ`
/// inequality for each given `γ`.
pub fn check_lemma_suite(graph: &BicolouredGraph, gammas: &[f64]) -> Result<Option<String>> {
    let conv = run_to_convergence(graph)?;
    let delta = graph.max_degree();
    let report = check_lemmas(&conv.trace, delta);
    if let Some(row) = report.violations().next() {
        return Ok(Some(format!("round {}: {row:?}", row.round)));
    }
    for &gamma in gammas {
        if let Some((round, _)) = lemma6(&conv.trace, delta, gamma).into_iter().find(|&(_, ok)| !ok) {
            return Ok(Some(format!("round {round}: f_i(R) <= {gamma}*w_i(B) fails")));
        }
    }
    Ok(None)
}

pub fn verify(graph: &BicolouredGraph, mode: VerifyMode, epsilon: f64) -> Result<Option<String>> {
    match mode {
        VerifyMode::Stability => check_stability(graph, epsilon),
        VerifyMode::Weight => check_weight(graph, epsilon),
        VerifyMode::Lemmas => check_lemma_suite(graph, &[epsilon]),
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub trace: RoundTrace,
    pub check_round: usize,
    pub ratio: f64,
}

impl SweepOutcome {
    pub fn ok(&self, epsilon: f64) -> bool {
        self.ratio <= epsilon
    }
}

/// Runs `max(max_rounds, i)` rounds where `i` is the stability round, and
/// reports `u_i/|M_i|` at `i`.
pub fn sweep(graph: &BicolouredGraph, max_rounds: usize, epsilon: f64) -> Result<SweepOutcome> {
    let check_round = stability_round(graph.max_degree(), epsilon)?;
    let trace = run_rounds(graph, max_rounds.max(check_round))?;
    let rec = trace.round(check_round).expect("trace covers the check round");
    let ratio = instability_ratio(rec.unstable, rec.matching.len());
    Ok(SweepOutcome { trace, check_round, ratio })
}

pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    sub_seed(seed, trial)
}

/// Runs independent estimator trials, each with a fresh oracle from
/// `make_oracle` and its own sub-seed.
pub fn estimate_trials<O, F>(
    mut make_oracle: F,
    n: u64,
    params: &EstimatorParams,
    seed: u64,
    trials: u64,
    true_size: Option<usize>,
) -> Result<Vec<EstimateRecord>>
where
    O: PreferenceOracle,
    F: FnMut() -> O,
{
    let budget = query_budget(params.max_degree, params.epsilon, params.delta)?;
    (0..trials)
        .map(|t| {
            let s = trial_seed(seed, t);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut oracle = make_oracle();
            let report = estimate_size(&mut oracle, n, params, &mut rng)?;
            Ok(EstimateRecord::new(t, s, &report, budget, true_size))
        })
        .collect()
}

/// Estimator parameters for a graph; `samples` replaces `N` (smoke runs).
pub fn params_for(graph: &BicolouredGraph, epsilon: f64, delta: f64, samples: Option<u64>) -> Result<EstimatorParams> {
    let params = estimator_params(graph.max_degree(), epsilon, delta)?;
    Ok(match samples {
        Some(s) => params.with_samples(s),
        None => params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use truncgs_core::GraphOracle;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn weight_mode_refuses_large_graphs() {
        let g = generate_random(&RandomGraphConfig::new(30, 30, 3, 1).weighted(true)).unwrap();
        assert!(matches!(check_weight(&g, 0.5), Err(CliError::Refused(_))));
    }

    #[test]
    fn small_checks_pass() {
        let g = generate_random(&RandomGraphConfig::new(5, 5, 3, 4).weighted(true)).unwrap();
        for mode in [VerifyMode::Stability, VerifyMode::Lemmas] {
            assert_eq!(verify(&g, mode, 0.5).unwrap(), None);
        }
        if g.edge_count() <= BRUTE_FORCE_EDGE_CAP {
            assert_eq!(verify(&g, VerifyMode::Weight, 0.5).unwrap(), None);
        }
    }

    #[test]
    fn sweep_covers_check_round() {
        let g = generate_random(&RandomGraphConfig::new(40, 40, 3, 2)).unwrap();
        let s = sweep(&g, 3, 0.5).unwrap();
        assert_eq!(s.check_round, 13);
        assert_eq!(s.trace.len(), 13);
        assert!(s.ok(0.5));
    }

    #[test]
    fn trials_are_reproducible() {
        let g = generate_random(&RandomGraphConfig::new(30, 30, 3, 9)).unwrap();
        let params = params_for(&g, 1.0, 0.5, Some(300)).unwrap();
        assert!(!params.guaranteed);
        let a = estimate_trials(|| GraphOracle::new(&g), 60, &params, 11, 3, None).unwrap();
        let b = estimate_trials(|| GraphOracle::new(&g), 60, &params, 11, 3, None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].seed, a[1].seed);
    }

    #[test]
    fn estimator_refuses_low_degree() {
        let g = generate_random(&RandomGraphConfig::new(10, 10, 2, 1)).unwrap();
        assert!(matches!(params_for(&g, 1.0, 0.5, None), Err(CliError::Estimator(_))));
    }
}
