//! Exact shortest paths under a monotone path cost.
//!
//! [`shortest_paths_from`] runs the pruned search from one source to every
//! other node. [`fixed_k_path`] answers the exactly-`k`-edges variant, and
//! [`brute_force_oracle`] enumerates every simple path, for verification on
//! small graphs.

mod candidates;
mod fixed_k;
mod oracle;
mod search;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cost::PathCost;
use crate::graph::{compose_path, MatrixGraph, NodeId, Path};
use crate::nodeset::NodeSet;
use crate::{Error, Result};

pub use candidates::{compute_candidate_set, CandidateSets};
pub use fixed_k::fixed_k_path;
pub use oracle::{
    brute_force_fixed_k, brute_force_oracle, brute_force_oracle_with_cap, enumerate_simple_paths, DEFAULT_ORACLE_CAP,
};

/// Costs closer than this are treated as equal; the lexicographically
/// smaller node sequence then wins.
pub const TIE_TOL: f64 = 1e-12;

/// Whether a path `(cost, nodes)` should replace the incumbent.
pub(crate) fn prefer(cost: f64, nodes: &[NodeId], inc_cost: f64, inc_nodes: &[NodeId]) -> bool {
    cost < inc_cost - TIE_TOL || (cost <= inc_cost + TIE_TOL && nodes < inc_nodes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Best path over all edge counts up to the cap.
    Exact,
    /// Best path with exactly this many edges.
    FixedK(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum number of edges per path; `None` searches all simple paths.
    pub k_max: Option<usize>,
    pub mode: SearchMode,
    /// Record candidate sets and pruned branches.
    pub trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k_max: None,
            mode: SearchMode::Exact,
            trace: false,
        }
    }
}

impl SolverConfig {
    /// Uncapped search, run to certification.
    pub fn certify() -> Self {
        Self::default()
    }

    pub fn capped(k_max: usize) -> Self {
        Self {
            k_max: Some(k_max),
            ..Self::default()
        }
    }

    pub fn fixed_k(k: usize) -> Self {
        Self {
            mode: SearchMode::FixedK(k),
            ..Self::default()
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    pub fn run_mode(&self) -> RunMode {
        if self.k_max.is_some() {
            RunMode::Sp
        } else {
            RunMode::Cert
        }
    }

    pub fn validate(&self, graph: &MatrixGraph) -> Result<()> {
        if self.k_max == Some(0) {
            return Err(Error::Usage("kMax must be at least 1".into()));
        }
        if let SearchMode::FixedK(k) = self.mode {
            if k == 0 {
                return Err(Error::Usage("fixed edge count must be at least 1".into()));
            }
            if k >= graph.len() {
                return Err(Error::Infeasible(format!(
                    "no simple path with {k} edges in a graph of {} nodes",
                    graph.len()
                )));
            }
        }
        Ok(())
    }
}

/// `Sp` results may stop at an edge cap; `Cert` results ran to natural
/// termination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunMode {
    #[serde(rename = "SP")]
    Sp,
    #[serde(rename = "CERT")]
    Cert,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Sp => "SP",
            RunMode::Cert => "CERT",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    /// One-edge extensions considered.
    pub edges_explored: u64,
    /// Composed matrices scored.
    pub paths_evaluated: u64,
    /// (prefix, target) pairs discarded by the pruning rules.
    pub pruned_count: u64,
    /// Seconds.
    pub wall_time: f64,
}

impl SearchStats {
    pub fn absorb(&mut self, other: &SearchStats) {
        self.edges_explored += other.edges_explored;
        self.paths_evaluated += other.paths_evaluated;
        self.pruned_count += other.pruned_count;
    }
}

/// No path from `prefix` to `target` with at least one more edge was
/// evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrunedBranch {
    pub prefix: Vec<NodeId>,
    pub target: NodeId,
}

#[derive(Clone, Debug, Default)]
pub struct SearchTrace {
    pub candidates: CandidateSets,
    pub pruned: Vec<PrunedBranch>,
}

impl SearchTrace {
    /// `T_k(t)` as an ascending node list, if level `k` was reached.
    pub fn candidate_set(&self, target: NodeId, k: usize) -> Option<Vec<NodeId>> {
        self.candidates.get(k, target).map(|s| s.iter().collect())
    }
}

#[derive(Clone, Debug)]
pub struct ShortestPathResult {
    pub source: NodeId,
    /// Indexed by target; `None` for nodes that were not requested.
    pub best_paths: Vec<Option<Path>>,
    pub certified: bool,
    pub mode: RunMode,
    /// Largest edge count whose paths were expanded.
    pub levels: usize,
    pub stats: SearchStats,
    pub trace: Option<SearchTrace>,
}

impl ShortestPathResult {
    pub fn path_to(&self, target: NodeId) -> Option<&Path> {
        self.best_paths.get(target).and_then(Option::as_ref)
    }

    /// JSON with node names. Wall time is reported only when `timing` is
    /// set so that repeated runs serialize identically.
    pub fn to_json(&self, graph: &MatrixGraph, timing: bool) -> Value {
        let targets: Vec<Value> = self
            .best_paths
            .iter()
            .enumerate()
            .filter(|&(t, _)| t != self.source)
            .filter_map(|(_, p)| p.as_ref())
            .map(|p| {
                json!({
                    "target": graph.node_name(p.target()),
                    "path": p.names(graph),
                    "cost": p.cost,
                    "certified": self.certified,
                })
            })
            .collect();
        json!({
            "source": graph.node_name(self.source),
            "mode": self.mode,
            "targets": targets,
            "stats": stats_json(&self.stats, timing),
        })
    }
}

pub(crate) fn stats_json(stats: &SearchStats, timing: bool) -> Value {
    json!({
        "edgesExplored": stats.edges_explored,
        "pathsEvaluated": stats.paths_evaluated,
        "prunedCount": stats.pruned_count,
        "wallTimeSeconds": if timing { stats.wall_time } else { 0.0 },
    })
}

fn check_node(graph: &MatrixGraph, node: NodeId) -> Result<()> {
    if node >= graph.len() {
        return Err(Error::UnknownNode(format!("#{node}")));
    }
    Ok(())
}

fn check_exact_mode(config: &SolverConfig, graph: &MatrixGraph) -> Result<()> {
    if let SearchMode::FixedK(_) = config.mode {
        return Err(Error::Usage("fixed edge-count queries go through fixed_k_path".into()));
    }
    config.validate(graph)
}

/// Best simple paths from `source` to every other node, with at most
/// `config.k_max` edges. Uncapped runs are certified global optima.
pub fn shortest_paths_from(
    graph: &MatrixGraph,
    source: NodeId,
    cost: &dyn PathCost,
    config: &SolverConfig,
) -> Result<ShortestPathResult> {
    check_node(graph, source)?;
    let mut targets = NodeSet::full(graph.len());
    targets.remove(source);
    solve_targets(graph, source, &targets, cost, config)
}

/// Best path between one pair. Only `target` drives the search; interior
/// nodes still range over the whole graph.
pub fn shortest_path(
    graph: &MatrixGraph,
    source: NodeId,
    target: NodeId,
    cost: &dyn PathCost,
    config: &SolverConfig,
) -> Result<(Path, ShortestPathResult)> {
    check_node(graph, source)?;
    check_node(graph, target)?;
    let targets = NodeSet::from_nodes(graph.len(), (source != target).then_some(target));
    let result = solve_targets(graph, source, &targets, cost, config)?;
    let path = result.path_to(target).cloned().expect("requested target is solved");
    Ok((path, result))
}

fn solve_targets(
    graph: &MatrixGraph,
    source: NodeId,
    targets: &NodeSet,
    cost: &dyn PathCost,
    config: &SolverConfig,
) -> Result<ShortestPathResult> {
    check_exact_mode(config, graph)?;
    let out = search::run(graph, source, targets, cost, config.k_max, config.trace)?;
    let mut best_paths = out.best;
    best_paths[source] = Some(compose_path(graph, &[source], cost)?);
    Ok(ShortestPathResult {
        source,
        best_paths,
        certified: out.certified,
        mode: config.run_mode(),
        levels: out.levels,
        stats: out.stats,
        trace: out.trace,
    })
}

/// Best paths between every ordered pair of nodes.
#[derive(Clone, Debug)]
pub struct AllPairs {
    node_count: usize,
    paths: Vec<Path>,
    pub certified: bool,
    pub mode: RunMode,
    pub stats: SearchStats,
}

impl AllPairs {
    pub fn len(&self) -> usize {
        self.node_count
    }

    pub fn is_empty(&self) -> bool {
        self.node_count == 0
    }

    pub fn path(&self, from: NodeId, to: NodeId) -> &Path {
        &self.paths[from * self.node_count + to]
    }

    pub fn cost(&self, from: NodeId, to: NodeId) -> f64 {
        self.path(from, to).cost
    }

    pub fn to_json(&self, graph: &MatrixGraph, timing: bool) -> Value {
        let n = self.node_count;
        let pairs: Vec<Value> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| {
                let p = self.path(i, j);
                json!({
                    "source": graph.node_name(i),
                    "target": graph.node_name(j),
                    "path": p.names(graph),
                    "cost": p.cost,
                })
            })
            .collect();
        json!({
            "mode": self.mode,
            "certified": self.certified,
            "pairs": pairs,
            "stats": stats_json(&self.stats, timing),
        })
    }
}

/// Runs the search from every source. For transpose-symmetric costs each
/// unordered pair is solved once and the reverse path is recomposed from the
/// reversed node sequence.
pub fn all_pairs(graph: &MatrixGraph, cost: &dyn PathCost, config: &SolverConfig) -> Result<AllPairs> {
    use rayon::prelude::*;

    check_exact_mode(config, graph)?;
    let start = std::time::Instant::now();
    let n = graph.len();
    let symmetric = cost.is_transpose_symmetric();
    let results: Vec<ShortestPathResult> = (0..n)
        .into_par_iter()
        .map(|s| {
            let targets = if symmetric {
                NodeSet::from_nodes(n, s + 1..n)
            } else {
                let mut t = NodeSet::full(n);
                t.remove(s);
                t
            };
            solve_targets(graph, s, &targets, cost, config)
        })
        .collect::<Result<_>>()?;

    let mut stats = SearchStats::default();
    let mut certified = true;
    let mut slots: Vec<Option<Path>> = vec![None; n * n];
    for r in results {
        stats.absorb(&r.stats);
        certified &= r.certified;
        for (t, p) in r.best_paths.into_iter().enumerate() {
            if let Some(p) = p {
                slots[r.source * n + t] = Some(p);
            }
        }
    }
    if symmetric {
        for i in 0..n {
            for j in i + 1..n {
                let forward = slots[i * n + j].as_ref().expect("solved pair");
                let reversed: Vec<NodeId> = forward.nodes.iter().rev().copied().collect();
                slots[j * n + i] = Some(compose_path(graph, &reversed, cost)?);
            }
        }
    }
    stats.wall_time = start.elapsed().as_secs_f64();
    Ok(AllPairs {
        node_count: n,
        paths: slots.into_iter().map(|p| p.expect("every pair solved")).collect(),
        certified,
        mode: config.run_mode(),
        stats,
    })
}
