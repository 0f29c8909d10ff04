//! Built-in rotation- and scale-invariant per-vertex descriptor.
//!
//! For every vertex: a histogram of its distances to all other vertices,
//! after centering at the centroid and dividing by the largest centroid
//! distance. Distances land in `[0, 2]` and are spread linearly over the two
//! nearest bin centers, which keeps the descriptor continuous in the vertex
//! positions. Rows sum to one.

use ndarray::Array2;

use crate::{Error, Result};

pub fn builtin_descriptor(vertices: &[[f64; 3]], bins: usize) -> Result<Array2<f64>> {
    let v = vertices.len();
    if v < 2 {
        return Err(Error::InvalidInput(format!(
            "descriptor needs at least two vertices, got {v}"
        )));
    }
    if bins == 0 {
        return Err(Error::InvalidInput("descriptor needs at least one bin".into()));
    }
    let mut centroid = [0.0; 3];
    for p in vertices {
        for k in 0..3 {
            centroid[k] += p[k];
        }
    }
    for c in &mut centroid {
        *c /= v as f64;
    }
    let centered: Vec<[f64; 3]> = vertices
        .iter()
        .map(|p| [p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]])
        .collect();
    let radius = centered
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
        .fold(0.0, f64::max);
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput("all vertices coincide".into()));
    }

    let width = 2.0 / bins as f64;
    let mut out = Array2::zeros((v, bins));
    for i in 0..v {
        let mut row = out.row_mut(i);
        for j in 0..v {
            if i == j {
                continue;
            }
            let (a, b) = (centered[i], centered[j]);
            let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt() / radius;
            // position in units of bins, bin centers at integers
            let x = (d / width - 0.5).clamp(0.0, (bins - 1) as f64);
            let lo = x.floor() as usize;
            let frac = x - lo as f64;
            row[lo] += 1.0 - frac;
            if lo + 1 < bins {
                row[lo + 1] += frac;
            }
        }
        let total: f64 = row.sum();
        row /= total;
    }
    Ok(out)
}
