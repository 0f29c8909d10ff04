//! Per-cluster percentile descriptors and the distances between them.

use ndarray::{Array2, ArrayView2};

use crate::{Error, Result};

/// `p x f` matrix whose row `r` holds the `levels[r]`-th percentile of each
/// feature column over one cluster's vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct PercentileMatrix {
    pub values: Array2<f64>,
    pub levels: Vec<f64>,
}

/// `p` equally spaced levels `(i + 0.5) / p * 100`.
pub fn percentile_levels(p: usize) -> Vec<f64> {
    (0..p).map(|i| (i as f64 + 0.5) / p as f64 * 100.0).collect()
}

/// Percentile of an ascending slice by linear interpolation between closest
/// ranks: with `h = (N - 1) * level / 100`, the result is
/// `x[floor h] + (h - floor h) * (x[floor h + 1] - x[floor h])`.
pub fn percentile_sorted(sorted: &[f64], level: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * level / 100.0;
    let lo = (h.floor() as usize).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn percentile_stats(features: ArrayView2<'_, f64>, cluster: &[usize], levels: &[f64]) -> Result<PercentileMatrix> {
    if cluster.is_empty() {
        return Err(Error::InvalidInput("percentiles of an empty cluster".into()));
    }
    if let Some(l) = levels.iter().find(|l| !(0.0..=100.0).contains(*l)) {
        return Err(Error::InvalidInput(format!("percentile level {l} outside [0, 100]")));
    }
    if levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("percentile levels must be ascending".into()));
    }
    let f = features.ncols();
    let mut values = Array2::zeros((levels.len(), f));
    let mut column = Vec::with_capacity(cluster.len());
    for c in 0..f {
        column.clear();
        column.extend(cluster.iter().map(|&v| features[[v, c]]));
        column.sort_by(f64::total_cmp);
        for (r, &level) in levels.iter().enumerate() {
            values[[r, c]] = percentile_sorted(&column, level);
        }
    }
    Ok(PercentileMatrix {
        values,
        levels: levels.to_vec(),
    })
}

/// Frobenius norm of `a - b`.
pub fn cluster_distance(a: &PercentileMatrix, b: &PercentileMatrix) -> Result<f64> {
    if a.values.shape() != b.values.shape() {
        return Err(Error::InvalidInput(format!(
            "percentile matrix shapes differ: {:?} vs {:?}",
            a.values.shape(),
            b.values.shape()
        )));
    }
    if a.levels != b.levels {
        return Err(Error::InvalidInput("percentile levels differ".into()));
    }
    Ok(a.values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Gaussian kernel `exp(-d^2 / sigma^2)`.
pub fn gaussian_similarity(d: f64, sigma: f64) -> f64 {
    (-(d * d) / (sigma * sigma)).exp()
}
