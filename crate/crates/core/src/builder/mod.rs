//! Probabilistic multi-matching graph construction.
//!
//! Each shape's per-vertex features are grouped into `n` k-means clusters and
//! every cluster is summarized by a `p x f` percentile matrix. For a pair of
//! shapes the `n x n` Frobenius distances between cluster summaries go
//! through a Gaussian kernel and are Sinkhorn-scaled into the doubly-stochastic
//! edge matrix. The reverse edge is the transpose.

mod descriptor;
mod kmeans;
pub mod mesh;
mod percentile;
mod sinkhorn;

use std::collections::BTreeSet;
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use descriptor::builtin_descriptor;
pub use kmeans::{kmeans_cluster, ClusterModel};
pub use percentile::{
    cluster_distance, gaussian_similarity, percentile_levels, percentile_sorted, percentile_stats, PercentileMatrix,
};
pub use sinkhorn::sinkhorn_normalize;

use crate::graph::MatrixGraph;
use crate::matrix::EdgeMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeRecord {
    pub id: String,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Option<Vec<[usize; 3]>>,
    /// `V x f` per-vertex descriptors; computed with the built-in
    /// descriptor when absent (if the configuration allows it).
    pub features: Option<Array2<f64>>,
}

impl ShapeRecord {
    pub fn new(id: impl Into<String>, vertices: Vec<[f64; 3]>) -> Self {
        ShapeRecord {
            id: id.into(),
            vertices,
            faces: None,
            features: None,
        }
    }

    pub fn with_faces(mut self, faces: Vec<[usize; 3]>) -> Self {
        self.faces = Some(faces);
        self
    }

    pub fn with_features(mut self, features: Array2<f64>) -> Self {
        self.features = Some(features);
        self
    }

    /// Loads a mesh and, if given, a feature CSV whose rows follow the mesh
    /// vertex order. The id is the mesh file stem.
    pub fn load(mesh: impl AsRef<Path>, features: Option<&Path>) -> Result<Self> {
        let mesh = mesh.as_ref();
        let id = mesh
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidInput(format!("{}: no file name", mesh.display())))?
            .to_string();
        let (vertices, faces) = mesh::read_mesh(mesh)?;
        let mut shape = ShapeRecord::new(id, vertices).with_faces(faces);
        if let Some(path) = features {
            shape.features = Some(mesh::read_features_csv(path)?);
        }
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Shape {
            id: self.id.clone(),
            source: Box::new(e),
        };
        if self.vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(wrap(Error::InvalidInput("non-finite vertex coordinate".into())));
        }
        if let Some(faces) = &self.faces {
            if faces.iter().flatten().any(|&i| i >= self.vertices.len()) {
                return Err(wrap(Error::InvalidInput("face index out of range".into())));
            }
        }
        if let Some(f) = &self.features {
            if f.nrows() != self.vertices.len() {
                return Err(wrap(Error::InvalidInput(format!(
                    "{} feature rows for {} vertices",
                    f.nrows(),
                    self.vertices.len()
                ))));
            }
            if f.iter().any(|x| !x.is_finite()) {
                return Err(wrap(Error::InvalidInput("non-finite feature value".into())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct BuilderConfig {
    /// Clusters per shape, i.e. the edge-matrix dimension.
    pub n: usize,
    /// Number of percentile levels per cluster summary.
    pub p: usize,
    /// Gaussian kernel bandwidth, in units of the Frobenius distance.
    pub sigma: f64,
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iter: usize,
    pub kmeans_seed: u64,
    pub kmeans_restarts: usize,
    /// Histogram bins of the built-in descriptor.
    pub descriptor_bins: usize,
    /// Compute the built-in descriptor for shapes without features.
    pub builtin_descriptor: bool,
}

impl Default for BuilderConfig {
    fn default() -> Self {
        BuilderConfig {
            n: 28,
            p: 300,
            sigma: 2.0,
            sinkhorn_tol: 1e-8,
            sinkhorn_max_iter: 10_000,
            kmeans_seed: 0,
            kmeans_restarts: 10,
            descriptor_bins: 32,
            builtin_descriptor: true,
        }
    }
}

/// Dataset presets: `(name, p, sigma)`, all with `n = 28`.
pub const PRESETS: &[(&str, usize, f64)] = &[
    ("non-rigid-world", 300, 2.0),
    ("tosca-michael", 3000, 4.5),
    ("tosca-victoria", 150, 0.7),
    ("tosca-cat", 150, 1.0),
    ("smal", 300, 3.0),
    ("shapenet-chairs", 1000, 2.0),
];

impl BuilderConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let &(_, p, sigma) = PRESETS
            .iter()
            .find(|(n, _, _)| *n == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown preset `{name}`")))?;
        Ok(BuilderConfig {
            p,
            sigma,
            ..Default::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.p < 1 {
            return bad("p must be at least 1");
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be positive");
        }
        if !(self.sinkhorn_tol > 0.0) || self.sinkhorn_max_iter == 0 {
            return bad("Sinkhorn tolerance and iteration cap must be positive");
        }
        if self.descriptor_bins == 0 {
            return bad("descriptorBins must be positive");
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: BuilderConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Clusters and per-cluster summaries of one shape.
#[derive(Clone, Debug)]
pub struct ShapeSignature {
    pub id: String,
    pub clusters: ClusterModel,
    pub descriptors: Vec<PercentileMatrix>,
}

impl ShapeSignature {
    pub fn compute(shape: &ShapeRecord, config: &BuilderConfig) -> Result<Self> {
        let wrap = |e: Error| Error::Shape {
            id: shape.id.clone(),
            source: Box::new(e),
        };
        shape.validate()?;
        let computed;
        let features = match &shape.features {
            Some(f) => f,
            None if config.builtin_descriptor => {
                computed = builtin_descriptor(&shape.vertices, config.descriptor_bins).map_err(wrap)?;
                &computed
            }
            None => {
                return Err(wrap(Error::InvalidInput(
                    "no per-vertex features and the built-in descriptor is disabled".into(),
                )))
            }
        };
        let clusters =
            kmeans_cluster(features.view(), config.n, config.kmeans_seed, config.kmeans_restarts).map_err(wrap)?;
        let levels = percentile_levels(config.p);
        let descriptors = clusters
            .members()
            .iter()
            .map(|members| percentile_stats(features.view(), members, &levels))
            .collect::<Result<Vec<_>>>()
            .map_err(wrap)?;
        Ok(ShapeSignature {
            id: shape.id.clone(),
            clusters,
            descriptors,
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.descriptors[0].values.ncols()
    }
}

/// `d[i][j]` = distance between cluster `i` of `x` and cluster `j` of `y`.
pub fn distance_matrix(x: &ShapeSignature, y: &ShapeSignature) -> Result<Array2<f64>> {
    let mut d = Array2::zeros((x.descriptors.len(), y.descriptors.len()));
    for (i, a) in x.descriptors.iter().enumerate() {
        for (j, b) in y.descriptors.iter().enumerate() {
            d[[i, j]] = cluster_distance(a, b)?;
        }
    }
    Ok(d)
}

pub fn kernel_matrix(x: &ShapeSignature, y: &ShapeSignature, sigma: f64) -> Result<Array2<f64>> {
    Ok(distance_matrix(x, y)?.mapv(|d| gaussian_similarity(d, sigma)))
}

/// Doubly-stochastic correspondence matrix from `x` to `y`.
pub fn edge_matrix(x: &ShapeSignature, y: &ShapeSignature, config: &BuilderConfig) -> Result<EdgeMatrix> {
    let wrap = |e: Error| Error::Pair {
        from: x.id.clone(),
        to: y.id.clone(),
        source: Box::new(e),
    };
    let d = distance_matrix(x, y).map_err(wrap)?;
    let kernel = d.mapv(|d| gaussian_similarity(d, config.sigma));
    if kernel.iter().any(|&k| k <= 0.0) {
        let dmax = d.iter().copied().fold(0.0, f64::max);
        return Err(wrap(Error::InvalidInput(format!(
            "Gaussian kernel underflows to zero (largest distance {dmax:.4}, sigma {}); increase sigma",
            config.sigma
        ))));
    }
    sinkhorn_normalize(&kernel, config.sinkhorn_tol, config.sinkhorn_max_iter).map_err(wrap)
}

pub fn compute_signatures(shapes: &[ShapeRecord], config: &BuilderConfig) -> Result<Vec<ShapeSignature>> {
    config.validate()?;
    let mut ids = BTreeSet::new();
    for s in shapes {
        if !ids.insert(s.id.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate shape id `{}`", s.id)));
        }
    }
    let signatures = shapes
        .par_iter()
        .map(|s| ShapeSignature::compute(s, config))
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = signatures.first() {
        let f = first.feature_dim();
        if let Some(other) = signatures.iter().find(|s| s.feature_dim() != f) {
            return Err(Error::Shape {
                id: other.id.clone(),
                source: Box::new(Error::DimensionMismatch {
                    left: other.feature_dim(),
                    right: f,
                }),
            });
        }
    }
    Ok(signatures)
}

/// Builds the complete correspondence graph of a shape collection.
pub fn build_graph(shapes: &[ShapeRecord], config: &BuilderConfig) -> Result<MatrixGraph> {
    if shapes.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least two shapes, got {}",
            shapes.len()
        )));
    }
    let mut signatures = compute_signatures(shapes, config)?;
    signatures.sort_by(|a, b| a.id.cmp(&b.id));
    graph_from_signatures(&signatures, config)
}

pub fn graph_from_signatures(signatures: &[ShapeSignature], config: &BuilderConfig) -> Result<MatrixGraph> {
    let pairs: Vec<(usize, usize)> = (0..signatures.len())
        .flat_map(|i| (i + 1..signatures.len()).map(move |j| (i, j)))
        .collect();
    let edges = pairs
        .par_iter()
        .map(|&(i, j)| {
            let m = edge_matrix(&signatures[i], &signatures[j], config)?;
            Ok((signatures[i].id.clone(), signatures[j].id.clone(), m))
        })
        .collect::<Result<Vec<_>>>()?;
    let ids = signatures.iter().map(|s| s.id.clone()).collect();
    MatrixGraph::new(config.n, ids, edges)
}

/// All pairwise cluster distances in the collection, ascending. Helps pick
/// a kernel bandwidth.
pub fn pairwise_distances(signatures: &[ShapeSignature]) -> Result<Vec<f64>> {
    let mut all = Vec::new();
    for i in 0..signatures.len() {
        for j in i + 1..signatures.len() {
            all.extend(distance_matrix(&signatures[i], &signatures[j])?.iter().copied());
        }
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}
