//! Lloyd's k-means with k-means++ seeding and seeded restarts.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

const MAX_LLOYD_ITERS: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterModel {
    /// Cluster index of each vertex.
    pub assignments: Vec<usize>,
    /// `n x f` cluster means.
    pub centroids: Array2<f64>,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
}

impl ClusterModel {
    pub fn n(&self) -> usize {
        self.centroids.nrows()
    }

    /// Vertex indices of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n()];
        for (v, &c) in self.assignments.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

#[inline]
fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best of `restarts` seeded runs by within-cluster sum of squares.
/// Deterministic for a given seed.
pub fn kmeans_cluster(features: ArrayView2<'_, f64>, n: usize, seed: u64, restarts: usize) -> Result<ClusterModel> {
    let v = features.nrows();
    if n == 0 {
        return Err(Error::InvalidInput("cluster count must be positive".into()));
    }
    if v < n {
        return Err(Error::Infeasible(format!("cannot form {n} clusters from {v} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ClusterModel> = None;
    for _ in 0..restarts.max(1) {
        let model = lloyd(features, seeds_plus_plus(features, n, &mut rng));
        if best.as_ref().is_none_or(|b| model.wcss < b.wcss) {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn seeds_plus_plus(features: ArrayView2<'_, f64>, n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let v = features.nrows();
    let mut centroids = Array2::zeros((n, features.ncols()));
    let first = rng.random_range(0..v);
    centroids.row_mut(0).assign(&features.row(first));
    let mut d2: Vec<f64> = (0..v).map(|i| sq_dist(features.row(i), centroids.row(0))).collect();
    for c in 1..n {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = v - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.random_range(0..v)
        };
        centroids.row_mut(c).assign(&features.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(features.row(i), centroids.row(c)));
        }
    }
    centroids
}

fn lloyd(features: ArrayView2<'_, f64>, mut centroids: Array2<f64>) -> ClusterModel {
    let v = features.nrows();
    let n = centroids.nrows();
    let mut assignments = vec![usize::MAX; v];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut next: Vec<usize> = (0..v).map(|i| nearest(features.row(i), &centroids)).collect();
        repair_empty(features, &mut centroids, &mut next, n);
        let changed = next != assignments;
        assignments = next;
        update_centroids(features, &mut centroids, &assignments);
        if !changed {
            break;
        }
    }
    let wcss = (0..v)
        .map(|i| sq_dist(features.row(i), centroids.row(assignments[i])))
        .sum();
    ClusterModel {
        assignments,
        centroids,
        wcss,
    }
}

fn nearest(x: ArrayView1<'_, f64>, centroids: &Array2<f64>) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, row) in centroids.rows().into_iter().enumerate() {
        let d = sq_dist(x, row);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// An empty cluster takes the point of the largest cluster that lies
/// farthest from that cluster's centroid, until no cluster is empty.
fn repair_empty(features: ArrayView2<'_, f64>, centroids: &mut Array2<f64>, assignments: &mut [usize], n: usize) {
    loop {
        let mut sizes = vec![0usize; n];
        for &c in assignments.iter() {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let largest = (0..n).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap();
        let mut far = usize::MAX;
        let mut far_d = -1.0;
        for (i, &c) in assignments.iter().enumerate() {
            if c == largest {
                let d = sq_dist(features.row(i), centroids.row(largest));
                if d > far_d {
                    far_d = d;
                    far = i;
                }
            }
        }
        assignments[far] = empty;
        centroids.row_mut(empty).assign(&features.row(far));
    }
}

fn update_centroids(features: ArrayView2<'_, f64>, centroids: &mut Array2<f64>, assignments: &[usize]) {
    let mut counts = vec![0usize; centroids.nrows()];
    centroids.fill(0.0);
    for (i, &c) in assignments.iter().enumerate() {
        counts[c] += 1;
        let mut row = centroids.row_mut(c);
        row += &features.row(i);
    }
    for (c, &k) in counts.iter().enumerate() {
        if k > 0 {
            let mut row = centroids.row_mut(c);
            row /= k as f64;
        }
    }
}
