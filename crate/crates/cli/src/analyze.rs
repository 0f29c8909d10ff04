//! Retrieval scoring, morphing and graph validation.

use std::path::{Path as FsPath, PathBuf};

use anyhow::{bail, Result};
use clap::Args;
use mvsp::analysis::{
    default_placements, evaluate_retrieval, morph as morph_sequence, placements_from_weights, read_labels,
    DistanceTable, DEFAULT_FRAME_COUNT,
};
use mvsp::builder::ShapeRecord;
use mvsp::cost::check_monotonicity;
use mvsp::graph::compose_path;
use mvsp::solver::{self, brute_force_oracle, fixed_k_path, SolverConfig};
use mvsp::MatrixGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{create_dir, emit, load_graph, node, CostKind, SolveArgs};

#[derive(Args, Debug)]
pub struct RetrieveArgs {
    /// Graph JSON; distances are its best-path costs.
    #[arg(long, conflicts_with = "table", required_unless_present = "table")]
    graph: Option<PathBuf>,

    /// Precomputed distance table JSON instead of a graph (for comparing
    /// other methods' distances).
    #[arg(long)]
    table: Option<PathBuf>,

    /// CSV of `shape,label` rows (header optional).
    #[arg(long)]
    labels: PathBuf,

    /// Output directory for `distances.json`, `retrieval_summary.csv` and
    /// `retrieval_per_query.csv`.
    #[arg(long)]
    out_dir: PathBuf,

    #[command(flatten)]
    solve: SolveArgs,
}

pub fn retrieve(args: RetrieveArgs) -> Result<()> {
    let labels = read_labels(&args.labels)?;
    let table = match (&args.graph, &args.table) {
        (Some(path), _) => {
            let graph = load_graph(path)?;
            let pairs = solver::all_pairs(&graph, args.solve.cost.cost(), &args.solve.config())?;
            DistanceTable::from_all_pairs(&graph, &pairs)
        }
        (None, Some(path)) => DistanceTable::read_json(path)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    let eval = evaluate_retrieval(&table, &labels)?;
    create_dir(&args.out_dir)?;
    table.write_json(args.out_dir.join("distances.json"))?;
    let summary = eval.summary_csv();
    emit(Some(&args.out_dir.join("retrieval_summary.csv")), &summary)?;
    emit(
        Some(&args.out_dir.join("retrieval_per_query.csv")),
        &eval.per_query_csv(),
    )?;
    emit(None, &summary)
}

#[derive(Args, Debug)]
pub struct MorphArgs {
    /// Keyframe meshes in path order (source first, target last).
    #[arg(conflicts_with = "graph", required_unless_present = "graph")]
    keyframes: Vec<PathBuf>,

    /// Take the keyframes from the best path in this graph instead.
    #[arg(long, requires_all = ["source", "target", "mesh_dir"])]
    graph: Option<PathBuf>,

    /// Source node of the path.
    #[arg(long, requires = "graph")]
    source: Option<String>,

    /// Target node of the path.
    #[arg(long, requires = "graph")]
    target: Option<String>,

    /// Directory holding `<node>.off` or `<node>.obj` for each path node.
    #[arg(long, requires = "graph")]
    mesh_dir: Option<PathBuf>,

    /// Use the best path with exactly this many edges.
    #[arg(long, requires = "graph", conflicts_with_all = ["k_max", "certify"])]
    fixed_k: Option<usize>,

    #[command(flatten)]
    solve: SolveArgs,

    /// Keyframe times, comma separated, from 0 to 1 strictly increasing.
    /// Default: cumulative direct-edge cost along the path, or uniform
    /// spacing for explicit keyframes.
    #[arg(long, value_delimiter = ',')]
    placements: Option<Vec<f64>>,

    /// Number of frames, sampled uniformly over [0, 1].
    #[arg(long, default_value_t = DEFAULT_FRAME_COUNT)]
    frames: usize,

    /// Also write the direct source-to-target blend to `naive/`.
    #[arg(long)]
    naive: bool,

    /// Output directory for `frame_XXXX.obj` and `manifest.json`.
    #[arg(long)]
    out_dir: PathBuf,
}

fn mesh_for(dir: &FsPath, name: &str) -> Result<PathBuf> {
    for ext in ["off", "obj"] {
        let p = dir.join(format!("{name}.{ext}"));
        if p.is_file() {
            return Ok(p);
        }
    }
    bail!(mvsp::Error::InvalidInput(format!(
        "no mesh for `{name}` in {}",
        dir.display()
    )))
}

pub fn morph(args: MorphArgs) -> Result<()> {
    let (keyframes, defaults) = match &args.graph {
        Some(path) => {
            let graph = load_graph(path)?;
            let s = node(&graph, args.source.as_deref().expect("clap requires --source"))?;
            let t = node(&graph, args.target.as_deref().expect("clap requires --target"))?;
            if s == t {
                bail!(mvsp::Error::Usage("source and target must differ".into()));
            }
            let cost = args.solve.cost.cost();
            let path = match args.fixed_k {
                Some(k) => fixed_k_path(&graph, s, t, k, cost)?,
                None => solver::shortest_path(&graph, s, t, cost, &args.solve.config())?.0,
            };
            let dir = args.mesh_dir.as_deref().expect("clap requires --mesh-dir");
            let keys = path
                .names(&graph)
                .iter()
                .map(|name| {
                    let mut shape = ShapeRecord::load(mesh_for(dir, name)?, None)?;
                    shape.id = name.clone();
                    Ok(shape)
                })
                .collect::<Result<Vec<_>>>()?;
            (keys, default_placements(&graph, &path, cost)?)
        }
        None => {
            let keys = args
                .keyframes
                .iter()
                .map(|p| Ok(ShapeRecord::load(p, None)?))
                .collect::<Result<Vec<_>>>()?;
            let uniform = placements_from_weights(&vec![1.0; keys.len().saturating_sub(1)]);
            (keys, uniform)
        }
    };
    let placements = args.placements.clone().unwrap_or(defaults);
    let seq = morph_sequence(&keyframes, &placements, args.frames)?;
    seq.write(&args.out_dir, args.naive)?;
    println!(
        "{} frames through {} (placements {}), wrote {}",
        seq.frames.len(),
        seq.keyframe_ids.join(" -> "),
        seq.placements.iter().map(f64::to_string).collect::<Vec<_>>().join(", "),
        args.out_dir.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Graph JSON.
    #[arg(long)]
    graph: PathBuf,

    /// Path cost.
    #[arg(long, value_enum, default_value_t = CostKind::Entropy)]
    cost: CostKind,

    /// Allowed deviation of edge-matrix row and column sums from one.
    #[arg(long, default_value_t = 1e-8)]
    marginal_tol: f64,

    /// Random matrix pairs for the monotonicity probe (also drawn from the
    /// graph's own edges).
    #[arg(long, default_value_t = 200)]
    samples: usize,

    /// Cap the metric suite's paths at this many edges (default: certify).
    #[arg(long)]
    k_max: Option<usize>,

    /// Run the exhaustive oracle comparison only up to this many nodes.
    #[arg(long, default_value_t = 7)]
    oracle_max_nodes: usize,
}

const MONOTONICITY_TOL: f64 = 1e-9;
const DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-9;
const TRIANGLE_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-9;
const TRIANGLE_MAX_NODES: usize = 10;

type Check = std::result::Result<String, String>;

fn monotonicity(graph: &MatrixGraph, cost: CostKind, samples: usize, seed: u64) -> Result<Check> {
    let cost = cost.cost();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = check_monotonicity(cost, graph.dim(), samples, MONOTONICITY_TOL, &mut rng)?;
    if !report.holds(MONOTONICITY_TOL) {
        return Ok(Err(format!(
            "{} of {} random pairs violate it (worst margin {:e}, identity cost {:e})",
            report.violations, report.samples, report.worst_margin, report.identity_cost
        )));
    }
    let n = graph.len();
    let mut worst = f64::INFINITY;
    if n >= 2 {
        let mut edge = || {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            graph.edge(a, b)
        };
        for _ in 0..samples {
            let (m, x) = (edge(), edge());
            worst = worst.min(cost.evaluate(&cost.compose(m, x)?)? - cost.evaluate(m)?);
        }
    }
    if worst < -MONOTONICITY_TOL {
        return Ok(Err(format!("graph edge products reach margin {worst:e}")));
    }
    Ok(Ok(format!(
        "{} random pairs and {samples} edge pairs, worst margins {:.3e} / {:.3e}",
        report.samples, report.worst_margin, worst
    )))
}

fn metric(graph: &MatrixGraph, pairs: &solver::AllPairs, cost: CostKind) -> Result<Check> {
    let cost = cost.cost();
    let n = graph.len();
    let name = |i| graph.node_name(i);
    for x in 0..n {
        if pairs.cost(x, x).abs() > DIAGONAL_TOL {
            return Ok(Err(format!("d({0},{0}) = {1}", name(x), pairs.cost(x, x))));
        }
        for y in 0..n {
            let d = pairs.cost(x, y);
            if !(d >= 0.0) {
                return Ok(Err(format!("d({},{}) = {d}", name(x), name(y))));
            }
            if (d - pairs.cost(y, x)).abs() > SYMMETRY_TOL {
                return Ok(Err(format!("d({0},{1}) != d({1},{0})", name(x), name(y))));
            }
        }
    }
    if n > TRIANGLE_MAX_NODES {
        return Ok(Ok(format!(
            "zero diagonal, symmetry, non-negativity; triangle skipped ({n} > {TRIANGLE_MAX_NODES} nodes)"
        )));
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let bound = cost.evaluate(&cost.compose(&pairs.path(x, y).composed, &pairs.path(y, z).composed)?)?;
                if pairs.cost(x, z) > bound + TRIANGLE_TOL {
                    return Ok(Err(format!(
                        "d({},{}) = {} exceeds the composed bound {bound} through {}",
                        name(x),
                        name(z),
                        pairs.cost(x, z),
                        name(y)
                    )));
                }
            }
        }
    }
    Ok(Ok(format!(
        "zero diagonal, symmetry, non-negativity, {} triangle triples",
        n * n * n
    )))
}

fn oracle(graph: &MatrixGraph, pairs: &solver::AllPairs, cost: CostKind, k_max: Option<usize>) -> Result<Check> {
    let n = graph.len();
    for s in 0..n {
        for t in (0..n).filter(|&t| t != s) {
            let want = brute_force_oracle(graph, s, t, cost.cost(), k_max)?;
            let got = pairs.path(s, t);
            if (got.cost - want.cost).abs() > ORACLE_TOL || got.nodes != want.nodes {
                let got_path = compose_path(graph, &got.nodes, cost.cost())?;
                return Ok(Err(format!(
                    "{} -> {}: search {:?} ({}) vs exhaustive {:?} ({})",
                    graph.node_name(s),
                    graph.node_name(t),
                    got_path.names(graph),
                    got.cost,
                    want.names(graph),
                    want.cost
                )));
            }
        }
    }
    Ok(Ok(format!(
        "{} ordered pairs match exhaustive enumeration",
        n * (n - 1)
    )))
}

pub fn validate(args: ValidateArgs, seed: u64) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let mut results: Vec<(&str, Check)> = Vec::new();
    results.push((
        "invariants",
        match graph.validate(args.marginal_tol) {
            Ok(()) => Ok(format!(
                "{} nodes, complete, transposed reverse edges, marginals within {:e}",
                graph.len(),
                args.marginal_tol
            )),
            Err(e) => Err(e.to_string()),
        },
    ));
    results.push(("monotonicity", monotonicity(&graph, args.cost, args.samples, seed)?));
    let config = match args.k_max {
        Some(k) => SolverConfig::capped(k),
        None => SolverConfig::certify(),
    };
    let pairs = solver::all_pairs(&graph, args.cost.cost(), &config)?;
    results.push(("metric", metric(&graph, &pairs, args.cost)?));
    let skipped = graph.len() > args.oracle_max_nodes;
    if !skipped {
        results.push(("oracle", oracle(&graph, &pairs, args.cost, args.k_max)?));
    }
    let mut failed = 0;
    for (name, check) in &results {
        match check {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if skipped {
        println!("SKIP oracle: {} nodes > {}", graph.len(), args.oracle_max_nodes);
    }
    if failed > 0 {
        bail!(mvsp::Error::InvalidGraph(format!(
            "{failed} of {} checks failed",
            results.len()
        )));
    }
    Ok(())
}
