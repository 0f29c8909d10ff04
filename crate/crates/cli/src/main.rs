//! `mvsp`: build shape graphs with matrix-valued edges, solve shortest
//! paths on them and run the retrieval, intermediate-shape and morphing
//! workflows.
//!
//! Failures print one line, `error[<exit code>]: <kind>: <message>`, on
//! standard error. Exit codes: 0 success, 2 invalid input, 3 infeasible
//! query, 4 convergence failure.

mod analyze;
mod build;
mod solve;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mvsp::solver::SolverConfig;
use mvsp::{AdditiveScalar, MatrixGraph, NodeId, PathCost, TotalEntropy};

#[derive(Parser, Debug)]
#[command(name = "mvsp", version, about, long_about = None)]
struct Cli {
    /// Worker threads for the parallel stages (0 = one per core). Results
    /// do not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Seed for every random choice (k-means seeding, synthetic data,
    /// sampled checks). Overrides `kmeansSeed` from a builder config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph JSON from meshes and optional per-vertex features.
    BuildGraph(build::BuildGraphArgs),
    /// Print the distribution of cluster distances, to help choose sigma.
    DistanceStats(build::DistanceStatsArgs),
    /// Best path between two nodes.
    ShortestPath(solve::ShortestPathArgs),
    /// Best paths between every ordered pair of nodes.
    AllPairs(solve::AllPairsArgs),
    /// Nearest-neighbor retrieval scores from best-path distances.
    Retrieve(analyze::RetrieveArgs),
    /// Shapes on the best path between two shapes.
    Intermediate(solve::IntermediateArgs),
    /// Piecewise-linear morph through keyframe meshes.
    Morph(analyze::MorphArgs),
    /// Time all-pairs runs in capped (SP) and certifying (CERT) mode.
    Bench(solve::BenchArgs),
    /// Check graph invariants, the metric properties and the exhaustive oracle.
    Validate(analyze::ValidateArgs),
    /// Write a seeded synthetic shape collection with family labels.
    Synth(build::SynthArgs),
    /// Write a seeded random graph of doubly-stochastic (or scalar) edges.
    RandomGraph(build::RandomGraphArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CostKind {
    /// Total entropy of the composed matrix.
    Entropy,
    /// Sum of 1x1 edge weights (ordinary shortest paths).
    Scalar,
}

impl CostKind {
    fn cost(self) -> &'static dyn PathCost {
        match self {
            CostKind::Entropy => &TotalEntropy,
            CostKind::Scalar => &AdditiveScalar,
        }
    }
}

/// Solver flags shared by the path commands.
#[derive(Args, Debug, Clone)]
struct SolveArgs {
    /// Cap paths at this many edges (SP mode). Without a cap the search
    /// runs until the result is certified optimal.
    #[arg(long, conflicts_with = "certify")]
    k_max: Option<usize>,

    /// Run to certification (the default when --k-max is absent).
    #[arg(long)]
    certify: bool,

    /// Path cost.
    #[arg(long, value_enum, default_value_t = CostKind::Entropy)]
    cost: CostKind,
}

impl SolveArgs {
    fn config(&self) -> SolverConfig {
        match self.k_max {
            Some(k) => SolverConfig::capped(k),
            None => SolverConfig::certify(),
        }
    }
}

fn load_graph(path: &Path) -> Result<MatrixGraph> {
    Ok(MatrixGraph::read_json(path)?)
}

fn node(graph: &MatrixGraph, name: &str) -> Result<NodeId> {
    Ok(graph.node_index(name)?)
}

/// Writes to `out`, or to standard output when no path is given.
fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::BuildGraph(a) => build::build_graph(a, seed),
        Command::DistanceStats(a) => build::distance_stats(a, seed),
        Command::ShortestPath(a) => solve::shortest_path(a),
        Command::AllPairs(a) => solve::all_pairs(a),
        Command::Retrieve(a) => analyze::retrieve(a),
        Command::Intermediate(a) => solve::intermediate(a),
        Command::Morph(a) => analyze::morph(a),
        Command::Bench(a) => solve::bench(a, seed.unwrap_or(0)),
        Command::Validate(a) => analyze::validate(a, seed.unwrap_or(0)),
        Command::Synth(a) => build::synth(a, seed.unwrap_or(0)),
        Command::RandomGraph(a) => build::random_graph(a, seed.unwrap_or(0)),
    }
}

/// `(exit code, kind)` of the library error in the chain, if any.
fn classify(err: &anyhow::Error) -> (i32, &'static str) {
    err.chain()
        .find_map(|e| e.downcast_ref::<mvsp::Error>())
        .map(|e| (e.exit_code(), e.kind()))
        .unwrap_or((2, "input"))
}

fn diagnostic(code: i32, kind: &str, message: &str) -> ExitCode {
    let message = message.replace(['\n', '\r'], " ");
    let message = message.strip_prefix(&format!("{kind}: ")).unwrap_or(&message);
    eprintln!("error[{code}]: {kind}: {message}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let message: Vec<&str> = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect();
            let message = message.join(" ");
            return diagnostic(2, "usage", message.strip_prefix("error: ").unwrap_or(&message));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, kind) = classify(&err);
            diagnostic(code, kind, &format!("{err:#}"))
        }
    }
}
