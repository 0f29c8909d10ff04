//! Complete graphs with matrix-valued edges, and paths over them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path as FsPath;

use serde::Deserialize;

use crate::cost::PathCost;
use crate::matrix::EdgeMatrix;
use crate::{Error, Result};

/// Index into [`MatrixGraph::nodes`]. Nodes are kept sorted by name, so
/// index order coincides with lexicographic name order.
pub type NodeId = usize;

/// Reverse edges must equal the transpose within this bound.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct MatrixGraph {
    nodes: Vec<String>,
    dim: usize,
    // dense |V| x |V| table, `None` on the diagonal
    edges: Vec<Option<EdgeMatrix>>,
}

impl MatrixGraph {
    /// Builds a complete graph from one matrix per unordered pair. Each entry
    /// `(from, to, m)` sets `M[from][to] = m` and `M[to][from] = m^T`. Giving
    /// both orientations of a pair is accepted only if they are transposes.
    pub fn new(
        dim: usize,
        nodes: Vec<String>,
        edges: impl IntoIterator<Item = (String, String, EdgeMatrix)>,
    ) -> Result<Self> {
        let mut sorted = nodes;
        sorted.sort();
        if sorted.is_empty() {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate node `{}`", w[0])));
        }
        let v = sorted.len();
        let mut graph = MatrixGraph {
            nodes: sorted,
            dim,
            edges: vec![None; v * v],
        };
        for (from, to, m) in edges {
            let i = graph.node_index(&from)?;
            let j = graph.node_index(&to)?;
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop on `{from}`")));
            }
            if m.dim() != dim {
                return Err(Error::Pair {
                    from,
                    to,
                    source: Box::new(Error::DimensionMismatch {
                        left: m.dim(),
                        right: dim,
                    }),
                });
            }
            let t = m.transpose();
            match &graph.edges[i * v + j] {
                None => {
                    graph.edges[i * v + j] = Some(m);
                    graph.edges[j * v + i] = Some(t);
                }
                Some(existing) => {
                    let diff = existing
                        .view()
                        .iter()
                        .zip(m.view().iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    if diff > SYMMETRY_TOL {
                        return Err(Error::InvalidGraph(format!(
                            "edges {from}->{to} and {to}->{from} are not transposes (max deviation {diff:e})"
                        )));
                    }
                }
            }
        }
        for i in 0..v {
            for j in 0..v {
                if i != j && graph.edges[i * v + j].is_none() {
                    return Err(Error::IncompleteGraph(format!(
                        "missing edge {} -> {}",
                        graph.nodes[i], graph.nodes[j]
                    )));
                }
            }
        }
        Ok(graph)
    }

    /// Builds a complete graph from `f(i, j)` for every `i < j`, where
    /// indices refer to the sorted node list.
    pub fn from_fn(
        dim: usize,
        nodes: Vec<String>,
        mut f: impl FnMut(NodeId, NodeId) -> Result<EdgeMatrix>,
    ) -> Result<Self> {
        let mut sorted = nodes.clone();
        sorted.sort();
        let mut edges = Vec::new();
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                edges.push((sorted[i].clone(), sorted[j].clone(), f(i, j)?));
            }
        }
        Self::new(dim, nodes, edges)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Shared edge-matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.nodes[id]
    }

    pub fn node_index(&self, name: &str) -> Result<NodeId> {
        self.nodes
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| Error::UnknownNode(name.to_string()))
    }

    /// Edge matrix `M[u][v]`.
    ///
    /// # Panics
    /// If `u == v` or either index is out of range.
    #[inline]
    pub fn edge(&self, u: NodeId, v: NodeId) -> &EdgeMatrix {
        self.edges[u * self.len() + v]
            .as_ref()
            .expect("no edge on the diagonal")
    }

    /// Checks every edge against the doubly-stochastic invariants (except
    /// for `1 x 1` scalar graphs) and the transpose symmetry.
    pub fn validate(&self, marginal_tol: f64) -> Result<()> {
        let v = self.len();
        for i in 0..v {
            for j in 0..v {
                if i == j {
                    continue;
                }
                let m = self.edge(i, j);
                let context = |e: Error| Error::Pair {
                    from: self.nodes[i].clone(),
                    to: self.nodes[j].clone(),
                    source: Box::new(e),
                };
                EdgeMatrix::with_tolerance(m.view().to_owned(), marginal_tol).map_err(context)?;
                let back = self.edge(j, i);
                for a in 0..self.dim {
                    for b in 0..self.dim {
                        if (m.get(a, b) - back.get(b, a)).abs() > SYMMETRY_TOL {
                            return Err(context(Error::InvalidGraph("reverse edge is not the transpose".into())));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON with one entry per unordered pair (`from < to`); floats carry 17
    /// significant digits so the file reloads bit-exactly.
    pub fn to_json_string(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{{\n  \"n\": {},\n  \"nodes\": [", self.dim);
        for (i, name) in self.nodes.iter().enumerate() {
            let sep = if i == 0 { "" } else { ", " };
            let _ = write!(out, "{sep}{}", serde_json::to_string(name).unwrap());
        }
        out.push_str("],\n  \"edges\": [");
        let mut first = true;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                out.push_str(if first { "\n    " } else { ",\n    " });
                first = false;
                let _ = write!(
                    out,
                    "{{\"from\": {}, \"to\": {}, \"matrix\": [",
                    serde_json::to_string(&self.nodes[i]).unwrap(),
                    serde_json::to_string(&self.nodes[j]).unwrap()
                );
                let m = self.edge(i, j);
                for a in 0..self.dim {
                    out.push_str(if a == 0 { "[" } else { ", [" });
                    for b in 0..self.dim {
                        let sep = if b == 0 { "" } else { ", " };
                        let _ = write!(out, "{sep}{:.16e}", m.get(a, b));
                    }
                    out.push(']');
                }
                out.push_str("]}");
            }
        }
        out.push_str(if first { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct EdgeEntry {
            from: String,
            to: String,
            matrix: Vec<Vec<f64>>,
        }
        #[derive(Deserialize)]
        struct GraphFile {
            n: usize,
            nodes: Vec<String>,
            edges: Vec<EdgeEntry>,
        }
        let file: GraphFile = serde_json::from_str(s)?;
        let mut edges = Vec::with_capacity(file.edges.len());
        for e in file.edges {
            let m = EdgeMatrix::from_rows(&e.matrix).map_err(|err| Error::Pair {
                from: e.from.clone(),
                to: e.to.clone(),
                source: Box::new(err),
            })?;
            edges.push((e.from, e.to, m));
        }
        Self::new(file.n, file.nodes, edges)
    }

    pub fn write_json(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

/// A simple path with its composed matrix and cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub composed: EdgeMatrix,
    pub cost: f64,
}

impl Path {
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Nodes strictly between source and target.
    pub fn interior(&self) -> &[NodeId] {
        if self.nodes.len() <= 2 {
            &[]
        } else {
            &self.nodes[1..self.nodes.len() - 1]
        }
    }

    pub fn names(&self, graph: &MatrixGraph) -> Vec<String> {
        self.nodes.iter().map(|&n| graph.node_name(n).to_string()).collect()
    }
}

/// Composes the edge matrices along `nodes` left to right and scores the
/// product. A single node yields the identity with its (zero) cost.
pub fn compose_path(graph: &MatrixGraph, nodes: &[NodeId], cost: &dyn PathCost) -> Result<Path> {
    let Some(&first) = nodes.first() else {
        return Err(Error::Usage("empty node sequence".into()));
    };
    let mut seen = BTreeMap::new();
    for &n in nodes {
        if n >= graph.len() {
            return Err(Error::UnknownNode(format!("#{n}")));
        }
        if seen.insert(n, ()).is_some() {
            return Err(Error::NonSimplePath(graph.node_name(n).to_string()));
        }
    }
    let composed = if nodes.len() == 1 {
        cost.identity(graph.dim())
    } else {
        let mut acc = graph.edge(first, nodes[1]).clone();
        for w in nodes[1..].windows(2) {
            acc = cost.compose(&acc, graph.edge(w[0], w[1]))?;
        }
        acc
    };
    let value = cost.evaluate(&composed)?;
    Ok(Path {
        nodes: nodes.to_vec(),
        composed,
        cost: value,
    })
}

/// [`compose_path`] over node names.
pub fn compose_path_by_name<S: AsRef<str>>(graph: &MatrixGraph, names: &[S], cost: &dyn PathCost) -> Result<Path> {
    let ids = names
        .iter()
        .map(|n| graph.node_index(n.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    compose_path(graph, &ids, cost)
}
