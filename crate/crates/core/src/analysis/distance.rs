use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::cost::PathCost;
use crate::graph::{MatrixGraph, NodeId};
use crate::solver::{all_pairs, AllPairs, SolverConfig};
use crate::{Error, Result};

const DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-9;

/// Pairwise shape distances: the cost of the best path between every pair.
///
/// Tables computed elsewhere (for example by a baseline method) load from the
/// same JSON layout; `paths` is then simply empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceTable {
    pub nodes: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    /// `paths[x][y]`: node names of the best path from `x` to `y`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<Vec<Vec<String>>>,
}

impl DistanceTable {
    pub fn from_all_pairs(graph: &MatrixGraph, pairs: &AllPairs) -> Self {
        let n = graph.len();
        DistanceTable {
            nodes: graph.nodes().to_vec(),
            dist: (0..n).map(|i| (0..n).map(|j| pairs.cost(i, j)).collect()).collect(),
            paths: (0..n)
                .map(|i| (0..n).map(|j| pairs.path(i, j).names(graph)).collect())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<NodeId> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn get(&self, x: NodeId, y: NodeId) -> f64 {
        self.dist[x][y]
    }

    /// Shape checks plus the metric properties every table produced by the
    /// solver satisfies: zero diagonal, symmetry and non-negativity.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let mut names: Vec<&String> = self.nodes.iter().collect();
        names.sort();
        names.dedup();
        if names.len() != n {
            return Err(Error::InvalidInput("distance table has duplicate node names".into()));
        }
        if self.dist.len() != n || self.dist.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("distance matrix must be {n} x {n}")));
        }
        if !self.paths.is_empty() && (self.paths.len() != n || self.paths.iter().any(|r| r.len() != n)) {
            return Err(Error::InvalidInput(format!("path table must be {n} x {n}")));
        }
        for i in 0..n {
            if self.dist[i][i].abs() > DIAGONAL_TOL {
                return Err(Error::InvalidInput(format!(
                    "nonzero self-distance {} at `{}`",
                    self.dist[i][i], self.nodes[i]
                )));
            }
            for j in 0..n {
                let d = self.dist[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "invalid distance {d} between `{}` and `{}`",
                        self.nodes[i], self.nodes[j]
                    )));
                }
                if (d - self.dist[j][i]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric distances between `{}` and `{}`",
                        self.nodes[i], self.nodes[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("distance tables serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let table: DistanceTable = serde_json::from_str(s)?;
        table.validate()?;
        Ok(table)
    }

    pub fn write_json(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

/// All-pairs best-path costs as a distance table.
pub fn shape_distance_table(graph: &MatrixGraph, cost: &dyn PathCost, config: &SolverConfig) -> Result<DistanceTable> {
    let pairs = all_pairs(graph, cost, config)?;
    Ok(DistanceTable::from_all_pairs(graph, &pairs))
}

/// The `k` nodes closest to `query`, nearest first; equal distances are
/// ordered by node name.
pub fn nearest_neighbors(table: &DistanceTable, query: NodeId, k: usize) -> Result<Vec<NodeId>> {
    let n = table.len();
    if query >= n {
        return Err(Error::UnknownNode(format!("#{query}")));
    }
    if k == 0 || k >= n {
        return Err(Error::Usage(format!(
            "neighbor count must be between 1 and {}",
            n.saturating_sub(1)
        )));
    }
    let mut others: Vec<NodeId> = (0..n).filter(|&j| j != query).collect();
    others.sort_by(|&a, &b| {
        table.dist[query][a]
            .total_cmp(&table.dist[query][b])
            .then_with(|| table.nodes[a].cmp(&table.nodes[b]))
    });
    others.truncate(k);
    Ok(others)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> DistanceTable {
        DistanceTable {
            nodes: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            dist: vec![
                vec![0.0, 2.0, 1.0, 2.0],
                vec![2.0, 0.0, 3.0, 1.0],
                vec![1.0, 3.0, 0.0, 5.0],
                vec![2.0, 1.0, 5.0, 0.0],
            ],
            paths: Vec::new(),
        }
    }

    #[test]
    fn neighbors_sorted_with_name_ties() {
        let t = table();
        assert_eq!(nearest_neighbors(&t, 0, 3).unwrap(), vec![2, 1, 3]);
        assert_eq!(nearest_neighbors(&t, 0, 1).unwrap(), vec![2]);
        assert!(nearest_neighbors(&t, 0, 4).is_err());
        assert!(nearest_neighbors(&t, 0, 0).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = table();
        assert_eq!(DistanceTable::from_json_str(&t.to_json_string()).unwrap(), t);
        let mut bad = t.clone();
        bad.dist[0][1] = 2.5;
        assert!(bad.validate().is_err());
        let mut bad = t;
        bad.dist[2][2] = 0.1;
        assert!(bad.validate().is_err());
    }
}
