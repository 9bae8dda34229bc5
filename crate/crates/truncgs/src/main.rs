use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use truncgs::commands::{self, CliError, VerifyMode};
use truncgs::export::{self, to_json};
use truncgs::{suite, FileOracle};
use truncgs_core::{run_to_convergence, BicolouredGraph, RandomGraphConfig};

#[derive(Parser)]
#[command(name = "truncgs", version, about = "Truncated distributed Gale-Shapley on bicoloured graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random graph.
    Generate {
        #[arg(long)]
        reds: u32,
        #[arg(long)]
        blues: u32,
        #[arg(long)]
        max_degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Derive preferences from random edge weights.
        #[arg(long)]
        weighted: bool,
        /// Mark some neighbours as tied.
        #[arg(long)]
        ties: bool,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the synchronous protocol and write a per-round trace.
    Run {
        graph: PathBuf,
        #[arg(long, conflicts_with = "to_convergence", required_unless_present = "to_convergence")]
        rounds: Option<usize>,
        #[arg(long)]
        to_convergence: bool,
        /// Trace CSV destination.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Check the round bounds on a graph or on seeded random graphs.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, value_enum)]
        mode: VerifyMode,
        /// Lemma CSV destination (lemmas mode, single graph).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Record u_i/|M_i| per round.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 30)]
        max_rounds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the size of the stable matching by sampling.
    Estimate {
        graph: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Use a small sample size; results carry no accuracy guarantee.
        #[arg(long)]
        smoke: bool,
        /// Sample size for smoke runs.
        #[arg(long, default_value_t = 2000, requires = "smoke")]
        samples: u64,
        /// JSON report destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// Graph file.
    graph: Option<PathBuf>,
    /// Number of seeded random graphs to use instead of a file.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    random: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Source {
    fn graphs(&self, mode: Option<VerifyMode>) -> commands::Result<Vec<(String, BicolouredGraph)>> {
        if let Some(path) = &self.graph {
            return Ok(vec![(path.display().to_string(), commands::read_graph(path)?)]);
        }
        let count = self.random.unwrap_or(1);
        Ok((0..count)
            .map(|k| {
                let inst = match mode {
                    Some(VerifyMode::Weight) => suite::small_weighted_instance(self.seed, k),
                    _ => suite::mixed_instance(self.seed, k),
                };
                (format!("instance {k}"), inst.graph)
            })
            .collect())
    }
}

fn emit(out: Option<&Path>, contents: &str) -> commands::Result<()> {
    match out {
        Some(path) => commands::write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every check passed.
fn dispatch(command: Command) -> commands::Result<bool> {
    match command {
        Command::Generate { reds, blues, max_degree, seed, weighted, ties, out } => {
            let config = RandomGraphConfig::new(reds, blues, max_degree, seed).weighted(weighted).ties(ties);
            let (text, summary) = commands::generate(&config)?;
            emit(out.as_deref(), &text)?;
            eprintln!("{summary}");
            Ok(true)
        }
        Command::Run { graph, rounds, trace_out, .. } => {
            let g = commands::read_graph(&graph)?;
            let outcome = commands::run(&g, rounds)?;
            if let Some(path) = &trace_out {
                commands::write_atomic(path, &export::trace_csv(&outcome.trace))?;
            }
            let last = outcome.trace.last().expect("at least one round");
            println!("rounds={}", outcome.trace.len());
            println!("matching_size={}", last.matching.len());
            println!("unstable={}", last.unstable);
            println!("f_red={}", last.potential);
            println!("epsilon_achieved={}", outcome.epsilon_achieved());
            if let Some(z) = outcome.convergence_round {
                println!("convergence_round={z}");
            }
            Ok(true)
        }
        Command::Verify { source, epsilon, mode, report } => {
            let graphs = source.graphs(Some(mode))?;
            let mut failures = 0;
            for (label, g) in &graphs {
                if let Some(msg) = commands::verify(g, mode, epsilon)? {
                    failures += 1;
                    println!("FAIL {label}: {msg}");
                }
            }
            if let (Some(path), [(_, g)]) = (&report, graphs.as_slice()) {
                let conv = run_to_convergence(g)?;
                let lemmas = truncgs_core::check_lemmas(&conv.trace, g.max_degree());
                commands::write_atomic(path, &export::lemma_csv(&lemmas))?;
            }
            println!("{mode:?}: {} of {} passed", graphs.len() - failures, graphs.len());
            Ok(failures == 0)
        }
        Command::Sweep { source, epsilon, max_rounds, out } => {
            let mut all_ok = true;
            for (label, g) in source.graphs(None)? {
                let s = commands::sweep(&g, max_rounds, epsilon)?;
                if out.is_some() || source.graph.is_none() {
                    println!("{label}: round {} ratio {} (epsilon {epsilon})", s.check_round, s.ratio);
                }
                all_ok &= s.ok(epsilon);
                if let Some(path) = &out {
                    commands::write_atomic(path, &export::sweep_csv(&s.trace))?;
                } else if source.graph.is_some() {
                    print!("{}", export::sweep_csv(&s.trace));
                }
            }
            Ok(all_ok)
        }
        Command::Estimate { graph, epsilon, delta, seed, trials, smoke, samples, out } => {
            let g = commands::read_graph(&graph)?;
            let params = commands::params_for(&g, epsilon, delta, smoke.then_some(samples))?;
            if !params.guaranteed {
                eprintln!("smoke run with N={}: no guarantee (N0={:.1})", params.samples, params.min_samples);
            }
            let text = std::fs::read_to_string(&graph).map_err(|source| CliError::Io { path: graph.clone(), source })?;
            let oracle = FileOracle::from_text(text)
                .map_err(|source| CliError::Format { path: graph.clone(), source })?;
            let truth = run_to_convergence(&g)?.matching.len();
            let records = commands::estimate_trials(
                || oracle.clone(),
                g.node_count() as u64,
                &params,
                seed,
                trials,
                Some(truth),
            )?;
            emit(out.as_deref(), &to_json(&records))?;
            let successes = records.iter().filter(|r| r.success == Some(true)).count();
            eprintln!("{successes}/{trials} trials within epsilon of |M_inf|={truth}");
            Ok(records.iter().all(|r| !r.failed && r.queries as u128 <= r.query_budget))
        }
    }
}
