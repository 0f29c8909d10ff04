//! Path queries and the runtime benchmark.

use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, ValueEnum};
use mvsp::analysis::{intermediate_path, DistanceTable, IntermediateMode};
use mvsp::graph::compose_path;
use mvsp::solver::{
    self, brute_force_fixed_k, brute_force_oracle_with_cap, fixed_k_path, SearchStats, SolverConfig, DEFAULT_ORACLE_CAP,
};
use mvsp::{synth, MatrixGraph, Path};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{emit, load_graph, node, CostKind, SolveArgs};

fn stats_json(stats: &SearchStats, timing: bool) -> Value {
    json!({
        "edgesExplored": stats.edges_explored,
        "pathsEvaluated": stats.paths_evaluated,
        "prunedCount": stats.pruned_count,
        "wallTimeSeconds": if timing { stats.wall_time } else { 0.0 },
    })
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON value serializes") + "\n"
}

#[derive(Args, Debug)]
pub struct ShortestPathArgs {
    /// Graph JSON.
    #[arg(long)]
    graph: PathBuf,

    /// Source node name.
    #[arg(long)]
    source: String,

    /// Target node name.
    #[arg(long)]
    target: String,

    #[command(flatten)]
    solve: SolveArgs,

    /// Best path with exactly this many edges.
    #[arg(long, conflicts_with_all = ["k_max", "certify"])]
    fixed_k: Option<usize>,

    /// Enumerate every simple path instead of searching (small graphs only).
    #[arg(long)]
    brute_force: bool,

    /// Largest node count the exhaustive enumeration accepts.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,

    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,

    /// Include wall time (output then differs between runs).
    #[arg(long)]
    timing: bool,

    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Answer {
    path: Path,
    mode: &'static str,
    certified: bool,
    stats: Option<SearchStats>,
}

pub fn shortest_path(args: ShortestPathArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let s = node(&graph, &args.source)?;
    let t = node(&graph, &args.target)?;
    let cost = args.solve.cost.cost();
    let config = args.solve.config();
    let answer = match (args.fixed_k, args.brute_force) {
        (Some(k), true) => {
            if graph.len() > args.oracle_cap {
                bail!(mvsp::Error::OracleCap {
                    nodes: graph.len(),
                    cap: args.oracle_cap
                });
            }
            Answer {
                path: brute_force_fixed_k(&graph, s, t, cost, k)?,
                mode: "ORACLE",
                certified: true,
                stats: None,
            }
        }
        (Some(k), false) => Answer {
            path: fixed_k_path(&graph, s, t, k, cost)?,
            mode: "FIXED-K",
            certified: true,
            stats: None,
        },
        (None, true) if s == t => Answer {
            path: compose_path(&graph, &[s], cost)?,
            mode: "ORACLE",
            certified: true,
            stats: None,
        },
        (None, true) => Answer {
            path: brute_force_oracle_with_cap(&graph, s, t, cost, config.k_max, args.oracle_cap)?,
            mode: "ORACLE",
            certified: config.k_max.is_none(),
            stats: None,
        },
        (None, false) => {
            let (path, result) = solver::shortest_path(&graph, s, t, cost, &config)?;
            Answer {
                path,
                mode: result.mode.as_str(),
                certified: result.certified,
                stats: Some(result.stats),
            }
        }
    };
    // Recompose so that every mode reports the cost of the same product.
    let path = compose_path(&graph, &answer.path.nodes, cost)?;
    let names = path.names(&graph);
    let text = if args.json {
        let mut v = json!({
            "source": args.source,
            "target": args.target,
            "mode": answer.mode,
            "path": names,
            "cost": path.cost,
            "edges": path.edge_count(),
            "certified": answer.certified,
        });
        if let Some(stats) = &answer.stats {
            v["stats"] = stats_json(stats, args.timing);
        }
        pretty(&v)
    } else {
        let mut text = format!(
            "path: {}\ncost: {}\nedges: {}\nmode: {}\ncertified: {}\n",
            names.join(" -> "),
            path.cost,
            path.edge_count(),
            answer.mode,
            answer.certified
        );
        if let Some(stats) = &answer.stats {
            text += &format!(
                "paths-evaluated: {}\npruned: {}\n",
                stats.paths_evaluated, stats.pruned_count
            );
            if args.timing {
                text += &format!("wall-time-seconds: {}\n", stats.wall_time);
            }
        }
        text
    };
    emit(args.out.as_ref(), &text)
}

#[derive(Args, Debug)]
pub struct AllPairsArgs {
    /// Graph JSON.
    #[arg(long)]
    graph: PathBuf,

    #[command(flatten)]
    solve: SolveArgs,

    /// Include wall time (output then differs between runs).
    #[arg(long)]
    timing: bool,

    /// Also write the distance table JSON (nodes, dist, paths) here.
    #[arg(long)]
    table: Option<PathBuf>,

    /// Write the JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn all_pairs(args: AllPairsArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let pairs = solver::all_pairs(&graph, args.solve.cost.cost(), &args.solve.config())?;
    if let Some(path) = &args.table {
        DistanceTable::from_all_pairs(&graph, &pairs).write_json(path)?;
    }
    emit(args.out.as_ref(), &pretty(&pairs.to_json(&graph, args.timing)))
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("selection").required(true).args(["fixed_k", "unrestricted"])))]
pub struct IntermediateArgs {
    /// Graph JSON.
    #[arg(long)]
    graph: PathBuf,

    /// Source node name.
    #[arg(long)]
    source: String,

    /// Target node name.
    #[arg(long)]
    target: String,

    /// Exactly this many edges, i.e. k - 1 intermediate shapes.
    #[arg(long, conflicts_with_all = ["k_max", "certify"])]
    fixed_k: Option<usize>,

    /// Whatever the best path passes through; may be nothing.
    #[arg(long)]
    unrestricted: bool,

    #[command(flatten)]
    solve: SolveArgs,

    /// Print JSON instead of one intermediate name per line.
    #[arg(long)]
    json: bool,
}

pub fn intermediate(args: IntermediateArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let s = node(&graph, &args.source)?;
    let t = node(&graph, &args.target)?;
    let mode = match args.fixed_k {
        Some(k) => IntermediateMode::FixedK(k),
        None => IntermediateMode::Unrestricted,
    };
    let cost = args.solve.cost.cost();
    let path = intermediate_path(&graph, s, t, mode, cost, &args.solve.config())?;
    let path = compose_path(&graph, &path.nodes, cost)?;
    let names: Vec<&str> = path.interior().iter().map(|&n| graph.node_name(n)).collect();
    let text = if args.json {
        pretty(&json!({
            "source": args.source,
            "target": args.target,
            "mode": match mode {
                IntermediateMode::FixedK(_) => "fixed-k",
                IntermediateMode::Unrestricted => "unrestricted",
            },
            "path": path.names(&graph),
            "cost": path.cost,
            "intermediates": names,
        }))
    } else {
        names.iter().map(|n| format!("{n}\n")).collect()
    };
    emit(None, &text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BenchMode {
    /// All pairs with paths capped at --k-max edges.
    Sp,
    /// All pairs run to certification.
    Cert,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Graph JSON to benchmark.
    #[arg(long, conflicts_with = "random_nodes", required_unless_present = "random_nodes")]
    graph: Option<PathBuf>,

    /// Benchmark a seeded random graph with this many nodes instead.
    #[arg(long)]
    random_nodes: Option<usize>,

    /// Edge-matrix dimension of the random graph.
    #[arg(long, default_value_t = 28)]
    dim: usize,

    /// Peakedness range of the random graph's edges.
    #[arg(long, default_value_t = 3.0)]
    beta_max: f64,

    /// Dataset id for the report (default: graph file stem, or
    /// `random-<nodes>x<dim>`).
    #[arg(long)]
    dataset: Option<String>,

    /// Edge cap for the SP run.
    #[arg(long, default_value_t = 3)]
    k_max: usize,

    /// Which runs to time.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [BenchMode::Sp, BenchMode::Cert])]
    modes: Vec<BenchMode>,

    /// Path cost.
    #[arg(long, value_enum, default_value_t = CostKind::Entropy)]
    cost: CostKind,

    /// Write the CSV report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Append the row to --out, writing the header only for a new file.
    #[arg(long, requires = "out")]
    append: bool,
}

const BENCH_HEADER: &str =
    "dataset,nodes,k_max,sp_seconds,cert_seconds,sp_paths_evaluated,cert_paths_evaluated,sp_pruned,cert_pruned,cert_certified";

struct Timed {
    seconds: f64,
    paths: u64,
    pruned: u64,
    certified: bool,
}

fn timed(graph: &MatrixGraph, cost: CostKind, config: &SolverConfig) -> Result<Timed> {
    let start = Instant::now();
    let r = solver::all_pairs(graph, cost.cost(), config)?;
    Ok(Timed {
        seconds: start.elapsed().as_secs_f64(),
        paths: r.stats.paths_evaluated as u64,
        pruned: r.stats.pruned_count as u64,
        certified: r.certified,
    })
}

pub fn bench(args: BenchArgs, seed: u64) -> Result<()> {
    let (graph, default_id) = match (&args.graph, args.random_nodes) {
        (Some(path), _) => {
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
            (load_graph(path)?, id)
        }
        (None, Some(nodes)) => {
            if nodes == 0 || args.dim == 0 {
                bail!(mvsp::Error::Usage("--random-nodes and --dim must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = synth::random_graph(nodes, args.dim, args.beta_max, &mut rng)?;
            (g, format!("random-{nodes}x{}", args.dim))
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let dataset = args.dataset.clone().unwrap_or(default_id);
    if dataset.contains([',', '"', '\n', '\r']) {
        bail!(mvsp::Error::Usage(
            "dataset id must not contain commas, quotes or newlines".into()
        ));
    }
    let sp = if args.modes.contains(&BenchMode::Sp) {
        Some(timed(&graph, args.cost, &SolverConfig::capped(args.k_max))?)
    } else {
        None
    };
    let cert = if args.modes.contains(&BenchMode::Cert) {
        Some(timed(&graph, args.cost, &SolverConfig::certify())?)
    } else {
        None
    };
    let field = |t: &Option<Timed>, f: fn(&Timed) -> String| t.as_ref().map(f).unwrap_or_default();
    let row = [
        dataset,
        graph.len().to_string(),
        args.k_max.to_string(),
        field(&sp, |t| t.seconds.to_string()),
        field(&cert, |t| t.seconds.to_string()),
        field(&sp, |t| t.paths.to_string()),
        field(&cert, |t| t.paths.to_string()),
        field(&sp, |t| t.pruned.to_string()),
        field(&cert, |t| t.pruned.to_string()),
        field(&cert, |t| t.certified.to_string()),
    ]
    .join(",");
    match (&args.out, args.append) {
        (Some(path), true) => {
            let fresh = !path.exists();
            let mut file = std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            if fresh {
                writeln!(file, "{BENCH_HEADER}")?;
            }
            writeln!(file, "{row}").with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
        (out, _) => emit(out.as_ref(), &format!("{BENCH_HEADER}\n{row}\n")),
    }
}
