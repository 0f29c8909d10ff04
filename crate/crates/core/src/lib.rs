//! Shortest paths on complete graphs whose edges carry composable matrices.
//!
//! The canonical instance attaches doubly-stochastic correspondence matrices
//! to the edges of a shape-collection graph and scores a path by the total
//! entropy of the product of its edge matrices. Extending a path can never
//! lower that score, which is what lets [`solver::shortest_paths_from`] prune
//! the factorial search space while still returning certified optima.
//!
//! Module map:
//!
//! * [`matrix`], [`cost`], [`graph`]: edge matrices, path-cost functionals
//!   and the complete matrix-valued graph.
//! * [`solver`]: the pruned exact search, the fixed-edge-count variant and an
//!   exhaustive oracle.
//! * [`builder`]: meshes and features to clusters, percentile descriptors,
//!   Gaussian similarities and Sinkhorn-scaled edge matrices.
//! * [`analysis`]: shape distances, retrieval scoring, intermediate shapes
//!   and morphing.
//! * [`synth`]: seeded synthetic graphs and shape families.

pub mod analysis;
pub mod builder;
pub mod cost;
mod error;
pub mod graph;
pub mod matrix;
mod nodeset;
pub mod solver;
pub mod synth;

pub use cost::{AdditiveScalar, PathCost, TotalEntropy};
pub use error::{Error, Result};
pub use graph::{MatrixGraph, NodeId, Path};
pub use matrix::{compose, total_entropy, EdgeMatrix};
pub use nodeset::NodeSet;
