//! Sinkhorn-Knopp scaling of a positive square matrix to a doubly-stochastic one.

use ndarray::{Array2, Axis};

use crate::matrix::{marginal_deviation, EdgeMatrix};
use crate::{Error, Result};

/// Alternates full row then column normalization until the largest row or
/// column sum deviation from one is at most `tol`.
///
/// A matrix that is already within `tol` is returned unchanged. Fails with
/// [`Error::Convergence`] after `max_iter` sweeps.
pub fn sinkhorn_normalize(m: &Array2<f64>, tol: f64, max_iter: usize) -> Result<EdgeMatrix> {
    if !m.is_square() || m.is_empty() {
        return Err(Error::InvalidMatrix(format!(
            "Sinkhorn input must be square and non-empty, got {:?}",
            m.shape()
        )));
    }
    if let Some(x) = m.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::InvalidMatrix(format!(
            "Sinkhorn input must be strictly positive, found {x}"
        )));
    }
    let mut a = m.clone();
    let mut residual = marginal_deviation(a.view());
    if residual <= tol {
        return Ok(EdgeMatrix::from_array_unchecked(a));
    }
    let mut row_residual = f64::INFINITY;
    for _ in 0..max_iter {
        for mut row in a.axis_iter_mut(Axis(0)) {
            let s = row.sum();
            row /= s;
        }
        for mut col in a.axis_iter_mut(Axis(1)) {
            let s = col.sum();
            col /= s;
        }
        // after the column step the row sums of the next sweep are averages
        // of the current ones, so their spread can only shrink
        let rows = a.rows().into_iter().map(|r| (r.sum() - 1.0).abs()).fold(0.0, f64::max);
        debug_assert!(
            rows <= row_residual * (1.0 + 1e-9) + 1e-14,
            "Sinkhorn residual increased: {row_residual:e} -> {rows:e}"
        );
        row_residual = rows;
        residual = marginal_deviation(a.view());
        if residual <= tol {
            return Ok(EdgeMatrix::from_array_unchecked(a));
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_by_two_fixed_point() {
        let m = sinkhorn_normalize(&array![[2.0, 1.0], [1.0, 2.0]], 1e-12, 1000).unwrap();
        let expected = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
        for (i, row) in expected.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert!((m.get(i, j) - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn doubly_stochastic_input_is_a_fixed_point() {
        let ds = array![[0.2, 0.3, 0.5], [0.5, 0.2, 0.3], [0.3, 0.5, 0.2]];
        let m = sinkhorn_normalize(&ds, 1e-10, 10).unwrap();
        assert_eq!(m.view(), ds.view());
    }

    #[test]
    fn rank_one_scales_to_uniform() {
        let r = [1.0, 2.0, 5.0, 0.5];
        let c = [3.0, 0.1, 1.0, 7.0];
        let outer = Array2::from_shape_fn((4, 4), |(i, j)| r[i] * c[j]);
        let m = sinkhorn_normalize(&outer, 1e-12, 1000).unwrap();
        for &x in m.view().iter() {
            assert!((x - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_positive_and_reports_non_convergence() {
        assert!(matches!(
            sinkhorn_normalize(&array![[1.0, 0.0], [1.0, 1.0]], 1e-8, 100),
            Err(Error::InvalidMatrix(_))
        ));
        let skewed = array![[1.0, 2.0], [3.0, 40.0]];
        let err = sinkhorn_normalize(&skewed, 1e-15, 1).unwrap_err();
        assert!(matches!(err, Error::Convergence { iterations: 1, .. }));
        assert_eq!(err.exit_code(), 4);
    }
}
