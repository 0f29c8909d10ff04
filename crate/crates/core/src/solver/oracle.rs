//! Exhaustive enumeration of simple paths. Every path is composed from
//! scratch, so nothing here shares state with the pruned search.

use super::prefer;
use crate::cost::PathCost;
use crate::graph::{compose_path, MatrixGraph, NodeId, Path};
use crate::{Error, Result};

/// Largest graph the oracle accepts by default.
pub const DEFAULT_ORACLE_CAP: usize = 9;

/// Calls `visit` on every simple path from `source` to `target` whose edge
/// count lies in `min_edges..=max_edges`, in lexicographic order.
pub fn enumerate_simple_paths(
    node_count: usize,
    source: NodeId,
    target: NodeId,
    min_edges: usize,
    max_edges: usize,
    visit: &mut dyn FnMut(&[NodeId]) -> Result<()>,
) -> Result<()> {
    fn walk(
        n: usize,
        target: NodeId,
        min_edges: usize,
        max_edges: usize,
        nodes: &mut Vec<NodeId>,
        visit: &mut dyn FnMut(&[NodeId]) -> Result<()>,
    ) -> Result<()> {
        let edges = nodes.len() - 1;
        if *nodes.last().unwrap() == target {
            if edges >= min_edges {
                visit(nodes)?;
            }
            return Ok(());
        }
        if edges == max_edges {
            return Ok(());
        }
        for u in 0..n {
            if !nodes.contains(&u) {
                nodes.push(u);
                walk(n, target, min_edges, max_edges, nodes, visit)?;
                nodes.pop();
            }
        }
        Ok(())
    }
    if source == target {
        return Ok(());
    }
    walk(
        node_count,
        target,
        min_edges.max(1),
        max_edges,
        &mut vec![source],
        visit,
    )
}

fn argmin(
    graph: &MatrixGraph,
    source: NodeId,
    target: NodeId,
    cost: &dyn PathCost,
    edges: (usize, usize),
    cap: usize,
) -> Result<Option<Path>> {
    let n = graph.len();
    if n > cap {
        return Err(Error::OracleCap { nodes: n, cap });
    }
    for node in [source, target] {
        if node >= n {
            return Err(Error::UnknownNode(format!("#{node}")));
        }
    }
    if source == target {
        return compose_path(graph, &[source], cost).map(Some);
    }
    let mut best: Option<Path> = None;
    enumerate_simple_paths(n, source, target, edges.0, edges.1, &mut |nodes| {
        let p = compose_path(graph, nodes, cost)?;
        if best.as_ref().is_none_or(|b| prefer(p.cost, &p.nodes, b.cost, &b.nodes)) {
            best = Some(p);
        }
        Ok(())
    })?;
    Ok(best)
}

/// Cheapest simple path with at most `k_max` edges (any length when `None`),
/// on graphs of at most [`DEFAULT_ORACLE_CAP`] nodes.
pub fn brute_force_oracle(
    graph: &MatrixGraph,
    source: NodeId,
    target: NodeId,
    cost: &dyn PathCost,
    k_max: Option<usize>,
) -> Result<Path> {
    brute_force_oracle_with_cap(graph, source, target, cost, k_max, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_oracle_with_cap(
    graph: &MatrixGraph,
    source: NodeId,
    target: NodeId,
    cost: &dyn PathCost,
    k_max: Option<usize>,
    cap: usize,
) -> Result<Path> {
    if k_max == Some(0) {
        return Err(Error::Usage("kMax must be at least 1".into()));
    }
    let max = k_max.unwrap_or(usize::MAX);
    Ok(argmin(graph, source, target, cost, (1, max), cap)?.expect("the direct edge always exists"))
}

/// Cheapest simple path with exactly `k` edges, by enumeration.
pub fn brute_force_fixed_k(
    graph: &MatrixGraph,
    source: NodeId,
    target: NodeId,
    cost: &dyn PathCost,
    k: usize,
) -> Result<Path> {
    if source == target || k == 0 {
        return Err(Error::Usage("need distinct endpoints and k >= 1".into()));
    }
    argmin(graph, source, target, cost, (k, k), DEFAULT_ORACLE_CAP)?.ok_or_else(|| {
        Error::Infeasible(format!(
            "no simple path with {k} edges in a graph of {} nodes",
            graph.len()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_match_combinatorics() {
        // simple s-t paths in K_n with e edges: (n-2)!/(n-1-e)!
        let n = 6;
        let mut per_len = vec![0usize; n];
        enumerate_simple_paths(n, 0, 5, 1, n, &mut |p| {
            per_len[p.len() - 1] += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(per_len, vec![0, 1, 4, 12, 24, 24]);
    }

    #[test]
    fn refuses_large_graphs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let g = crate::synth::random_scalar_graph(10, 0.0, 1.0, &mut rng).unwrap();
        let err = brute_force_oracle(&g, 0, 1, &crate::AdditiveScalar, None).unwrap_err();
        assert!(matches!(err, Error::OracleCap { nodes: 10, cap: 9 }));
    }
}
