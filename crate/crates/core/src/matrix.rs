//! Square edge matrices and their algebra.
//!
//! An [`EdgeMatrix`] of dimension `n >= 2` is doubly stochastic: entries in
//! `[0, 1]`, every row and column summing to one. Products of such matrices
//! stay doubly stochastic, so [`compose`] does not re-validate. The `1 x 1`
//! case is reserved for scalar path costs and only has to be finite and
//! non-negative.

use ndarray::{Array2, ArrayView2};

use crate::{Error, Result};

/// Entry range slack for `[0, 1]` membership.
pub const ENTRY_TOL: f64 = 1e-9;
/// Row and column sum slack accepted on construction.
pub const MARGINAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMatrix {
    entries: Array2<f64>,
}

impl EdgeMatrix {
    /// Validating constructor.
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        Self::with_tolerance(entries, MARGINAL_TOL)
    }

    /// Validates with a caller-chosen marginal tolerance.
    pub fn with_tolerance(entries: Array2<f64>, marginal_tol: f64) -> Result<Self> {
        let m = EdgeMatrix { entries };
        m.validate(marginal_tol)?;
        Ok(m)
    }

    /// Wraps a matrix that is doubly stochastic by construction.
    pub(crate) fn from_array_unchecked(entries: Array2<f64>) -> Self {
        debug_assert!(entries.is_square());
        EdgeMatrix { entries }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        let mut entries = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                entries[[i, j]] = x;
            }
        }
        Self::new(entries)
    }

    pub fn identity(n: usize) -> Self {
        EdgeMatrix {
            entries: Array2::eye(n),
        }
    }

    /// All entries `1/n`.
    pub fn uniform(n: usize) -> Self {
        EdgeMatrix {
            entries: Array2::from_elem((n, n), 1.0 / n as f64),
        }
    }

    /// Permutation matrix with a one at `(i, perm[i])`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut entries = Array2::zeros((n, n));
        for (i, &j) in perm.iter().enumerate() {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidMatrix(format!("{perm:?} is not a permutation")));
            }
            entries[[i, j]] = 1.0;
        }
        Ok(EdgeMatrix { entries })
    }

    /// A `1 x 1` matrix carrying a non-negative scalar.
    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(Array2::from_elem((1, 1), value))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn into_array(self) -> Array2<f64> {
        self.entries
    }

    pub fn transpose(&self) -> Self {
        EdgeMatrix {
            entries: self.entries.t().to_owned(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.outer_iter().map(|r| r.to_vec()).collect()
    }

    /// Largest deviation of any row or column sum from one.
    pub fn max_marginal_deviation(&self) -> f64 {
        marginal_deviation(self.entries.view())
    }

    fn validate(&self, marginal_tol: f64) -> Result<()> {
        let n = self.dim();
        if !self.entries.is_square() || n == 0 {
            return Err(Error::InvalidMatrix(format!(
                "expected a non-empty square matrix, got {:?}",
                self.entries.shape()
            )));
        }
        if let Some(x) = self.entries.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!("non-finite entry {x}")));
        }
        if n == 1 {
            let x = self.entries[[0, 0]];
            if x < 0.0 {
                return Err(Error::InvalidMatrix(format!("negative scalar {x}")));
            }
            return Ok(());
        }
        for ((i, j), &x) in self.entries.indexed_iter() {
            if !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(&x) {
                return Err(Error::InvalidMatrix(format!("entry ({i},{j}) = {x} outside [0,1]")));
            }
        }
        let dev = self.max_marginal_deviation();
        if dev > marginal_tol {
            return Err(Error::InvalidMatrix(format!(
                "not doubly stochastic: marginal deviation {dev:e} exceeds {marginal_tol:e}"
            )));
        }
        Ok(())
    }
}

pub(crate) fn marginal_deviation(m: ArrayView2<'_, f64>) -> f64 {
    let rows = m.rows().into_iter().map(|r| (r.sum() - 1.0).abs());
    let cols = m.columns().into_iter().map(|c| (c.sum() - 1.0).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// Matrix product `a * b`.
pub fn compose(a: &EdgeMatrix, b: &EdgeMatrix) -> Result<EdgeMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(EdgeMatrix {
        entries: a.entries.dot(&b.entries),
    })
}

/// Total entropy `-sum x ln x` over all entries, with `0 ln 0 = 0`.
///
/// Entries in `[-1e-9, 0)` are round-off and count as zero; anything more
/// negative is rejected.
pub fn total_entropy(m: &EdgeMatrix) -> Result<f64> {
    let mut h = 0.0;
    for &x in m.entries.iter() {
        if x < -ENTRY_TOL {
            return Err(Error::InvalidMatrix(format!("negative entry {x}")));
        }
        if x > 0.0 {
            h -= x * x.ln();
        }
    }
    // entries a hair above 1 contribute tiny negative terms
    Ok(h.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_is_neutral() {
        let m = EdgeMatrix::new(array![[0.2, 0.8], [0.8, 0.2]]).unwrap();
        let i = EdgeMatrix::identity(2);
        assert_eq!(compose(&i, &m).unwrap(), m);
        assert_eq!(compose(&m, &i).unwrap(), m);
    }

    #[test]
    fn permutation_times_transpose_is_identity() {
        let p = EdgeMatrix::permutation(&[2, 0, 3, 1]).unwrap();
        assert_eq!(compose(&p, &p.transpose()).unwrap(), EdgeMatrix::identity(4));
    }

    #[test]
    fn uniform_is_idempotent() {
        let u = EdgeMatrix::uniform(3);
        let uu = compose(&u, &u).unwrap();
        for (a, b) in uu.view().iter().zip(u.view().iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_rejects_dimension_mismatch() {
        let err = compose(&EdgeMatrix::identity(2), &EdgeMatrix::identity(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { left: 2, right: 3 }));
        assert!(err.to_string().contains('2') && err.to_string().contains('3'));
    }

    #[test]
    fn entropy_of_binary_matrices_is_zero() {
        assert_eq!(total_entropy(&EdgeMatrix::identity(5)).unwrap(), 0.0);
        let p = EdgeMatrix::permutation(&[3, 1, 4, 0, 2]).unwrap();
        assert_eq!(total_entropy(&p).unwrap(), 0.0);
    }

    #[test]
    fn entropy_of_uniform_is_n_ln_n() {
        let h = total_entropy(&EdgeMatrix::uniform(4)).unwrap();
        assert!((h - 4.0 * 4f64.ln()).abs() < 1e-12);
        assert!((h - 5.5452).abs() < 1e-4);
    }

    #[test]
    fn entropy_clamps_roundoff_and_rejects_corruption() {
        let m = EdgeMatrix::from_array_unchecked(array![[1.0 + 5e-10, -5e-10], [-5e-10, 1.0 + 5e-10]]);
        assert!(total_entropy(&m).unwrap().abs() < 1e-8);
        let bad = EdgeMatrix::from_array_unchecked(array![[1.1, -0.1], [-0.1, 1.1]]);
        assert!(matches!(total_entropy(&bad), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn construction_checks_invariants() {
        assert!(EdgeMatrix::new(array![[0.5, 0.5], [0.5, 0.5]]).is_ok());
        assert!(EdgeMatrix::new(array![[0.6, 0.5], [0.4, 0.5]]).is_err());
        assert!(EdgeMatrix::new(array![[1.2, -0.2], [-0.2, 1.2]]).is_err());
        assert!(EdgeMatrix::new(Array2::zeros((2, 3))).is_err());
        assert!(EdgeMatrix::scalar(3.5).is_ok());
        assert!(EdgeMatrix::scalar(-1.0).is_err());
        assert!(EdgeMatrix::permutation(&[0, 0]).is_err());
        assert!(EdgeMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5]]).is_err());
    }
}
