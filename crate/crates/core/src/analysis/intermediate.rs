use crate::cost::PathCost;
use crate::graph::{MatrixGraph, NodeId, Path};
use crate::solver::{fixed_k_path, shortest_path, SolverConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntermediateMode {
    /// Exactly `k` edges, hence `k - 1` intermediate shapes.
    FixedK(usize),
    /// Whatever the best path passes through; possibly nothing.
    Unrestricted,
}

/// The path whose interior supplies the intermediate shapes.
pub fn intermediate_path(
    graph: &MatrixGraph,
    source: NodeId,
    target: NodeId,
    mode: IntermediateMode,
    cost: &dyn PathCost,
    config: &SolverConfig,
) -> Result<Path> {
    if source == target {
        return Err(Error::Usage("source and target must differ".into()));
    }
    match mode {
        IntermediateMode::FixedK(k) => fixed_k_path(graph, source, target, k, cost),
        IntermediateMode::Unrestricted => Ok(shortest_path(graph, source, target, cost, config)?.0),
    }
}

/// Shapes strictly between `source` and `target` on the chosen path.
pub fn intermediate_shapes(
    graph: &MatrixGraph,
    source: NodeId,
    target: NodeId,
    mode: IntermediateMode,
    cost: &dyn PathCost,
    config: &SolverConfig,
) -> Result<Vec<NodeId>> {
    intermediate_path(graph, source, target, mode, cost, config).map(|p| p.interior().to_vec())
}
