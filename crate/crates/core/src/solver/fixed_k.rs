use super::{prefer, TIE_TOL};
use crate::cost::PathCost;
use crate::graph::{compose_path, MatrixGraph, NodeId, Path};
use crate::matrix::EdgeMatrix;
use crate::{Error, Result};

struct Search<'a> {
    graph: &'a MatrixGraph,
    cost: &'a dyn PathCost,
    target: NodeId,
    k: usize,
    best: Option<Path>,
}

impl Search<'_> {
    // Depth-first in ascending node order. A prefix whose cost already
    // exceeds the incumbent cannot be completed into a better path.
    fn descend(&mut self, nodes: &mut Vec<NodeId>, composed: &EdgeMatrix) -> Result<()> {
        let last = *nodes.last().unwrap();
        if nodes.len() == self.k {
            let m = self.cost.compose(composed, self.graph.edge(last, self.target))?;
            let value = self.cost.evaluate(&m)?;
            nodes.push(self.target);
            if self
                .best
                .as_ref()
                .is_none_or(|b| prefer(value, nodes, b.cost, &b.nodes))
            {
                self.best = Some(Path {
                    nodes: nodes.clone(),
                    composed: m,
                    cost: value,
                });
            }
            nodes.pop();
            return Ok(());
        }
        for u in 0..self.graph.len() {
            if u == self.target || nodes.contains(&u) {
                continue;
            }
            let m = self.cost.compose(composed, self.graph.edge(last, u))?;
            let value = self.cost.evaluate(&m)?;
            if self.best.as_ref().is_some_and(|b| value > b.cost + TIE_TOL) {
                continue;
            }
            nodes.push(u);
            self.descend(nodes, &m)?;
            nodes.pop();
        }
        Ok(())
    }
}

/// Cheapest simple path from `source` to `target` with exactly `k` edges,
/// ties going to the lexicographically smallest node sequence.
pub fn fixed_k_path(
    graph: &MatrixGraph,
    source: NodeId,
    target: NodeId,
    k: usize,
    cost: &dyn PathCost,
) -> Result<Path> {
    let n = graph.len();
    for node in [source, target] {
        if node >= n {
            return Err(Error::UnknownNode(format!("#{node}")));
        }
    }
    if source == target {
        return Err(Error::Usage("source and target must differ".into()));
    }
    if k == 0 {
        return Err(Error::Usage("fixed edge count must be at least 1".into()));
    }
    if k >= n {
        return Err(Error::Infeasible(format!(
            "no simple path with {k} edges in a graph of {n} nodes"
        )));
    }
    if k == 1 {
        return compose_path(graph, &[source, target], cost);
    }
    let mut search = Search {
        graph,
        cost,
        target,
        k,
        best: None,
    };
    // the source's identity is never materialized: start from its first edge
    for u in 0..n {
        if u == source || u == target {
            continue;
        }
        let m = graph.edge(source, u).clone();
        let value = cost.evaluate(&m)?;
        if search.best.as_ref().is_some_and(|b| value > b.cost + TIE_TOL) {
            continue;
        }
        search.descend(&mut vec![source, u], &m)?;
    }
    Ok(search.best.expect("k < |V| guarantees a path"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::TotalEntropy;
    use crate::synth;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_and_two_edges_are_forced() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = synth::random_graph(3, 3, 2.0, &mut rng).unwrap();
        assert_eq!(fixed_k_path(&g, 0, 2, 1, &TotalEntropy).unwrap().nodes, vec![0, 2]);
        assert_eq!(fixed_k_path(&g, 0, 2, 2, &TotalEntropy).unwrap().nodes, vec![0, 1, 2]);
    }

    #[test]
    fn invalid_edge_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = synth::random_graph(4, 2, 2.0, &mut rng).unwrap();
        assert!(matches!(
            fixed_k_path(&g, 0, 1, 4, &TotalEntropy),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(fixed_k_path(&g, 0, 1, 0, &TotalEntropy), Err(Error::Usage(_))));
        assert!(matches!(fixed_k_path(&g, 2, 2, 1, &TotalEntropy), Err(Error::Usage(_))));
        let hamiltonian = fixed_k_path(&g, 0, 1, 3, &TotalEntropy).unwrap();
        assert_eq!(hamiltonian.nodes.len(), 4);
    }
}
