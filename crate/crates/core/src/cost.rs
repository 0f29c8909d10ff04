//! Path-cost functionals.
//!
//! A [`PathCost`] bundles the composition operation of its matrix family with
//! the scoring function applied to a composed matrix. The solver is exact only
//! for costs that never decrease when a path is extended, i.e.
//! `evaluate(compose(m, x)) >= evaluate(m)`, and that score the identity as
//! zero. [`check_monotonicity`] probes that contract on random samples.

use ndarray::Array2;
use rand::Rng;

use crate::matrix::{self, EdgeMatrix};
use crate::{Error, Result};

pub trait PathCost: Send + Sync {
    fn name(&self) -> &str;

    fn evaluate(&self, m: &EdgeMatrix) -> Result<f64>;

    fn compose(&self, a: &EdgeMatrix, b: &EdgeMatrix) -> Result<EdgeMatrix> {
        matrix::compose(a, b)
    }

    fn identity(&self, n: usize) -> EdgeMatrix {
        EdgeMatrix::identity(n)
    }

    /// Whether reversing a path in a transpose-symmetric graph leaves its
    /// cost unchanged. Lets all-pairs searches solve each unordered pair once.
    fn is_transpose_symmetric(&self) -> bool {
        false
    }
}

/// Total entropy of the composed correspondence.
#[derive(Clone, Copy, Debug, Default)]
pub struct TotalEntropy;

impl PathCost for TotalEntropy {
    fn name(&self) -> &str {
        "total-entropy"
    }

    fn evaluate(&self, m: &EdgeMatrix) -> Result<f64> {
        matrix::total_entropy(m)
    }

    fn is_transpose_symmetric(&self) -> bool {
        true
    }
}

/// Ordinary additive path length on `1 x 1` matrices holding non-negative
/// scalars: composition is addition and the identity is zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct AdditiveScalar;

impl AdditiveScalar {
    fn scalar(m: &EdgeMatrix) -> Result<f64> {
        if m.dim() != 1 {
            return Err(Error::DimensionMismatch {
                left: m.dim(),
                right: 1,
            });
        }
        Ok(m.get(0, 0))
    }
}

impl PathCost for AdditiveScalar {
    fn name(&self) -> &str {
        "additive-scalar"
    }

    fn evaluate(&self, m: &EdgeMatrix) -> Result<f64> {
        Self::scalar(m)
    }

    fn compose(&self, a: &EdgeMatrix, b: &EdgeMatrix) -> Result<EdgeMatrix> {
        let sum = Self::scalar(a)? + Self::scalar(b)?;
        Ok(EdgeMatrix::from_array_unchecked(Array2::from_elem((1, 1), sum)))
    }

    fn identity(&self, _n: usize) -> EdgeMatrix {
        EdgeMatrix::from_array_unchecked(Array2::zeros((1, 1)))
    }

    fn is_transpose_symmetric(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub violations: usize,
    /// Smallest observed `evaluate(m * x) - evaluate(m)`.
    pub worst_margin: f64,
    pub identity_cost: f64,
}

impl MonotonicityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.violations == 0 && self.identity_cost.abs() <= tol
    }
}

/// Samples random doubly-stochastic pairs of dimension `n` and counts
/// violations of `evaluate(m * x) >= evaluate(m) - tol`.
pub fn check_monotonicity<R: Rng + ?Sized>(
    cost: &dyn PathCost,
    n: usize,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<MonotonicityReport> {
    let identity_cost = cost.evaluate(&cost.identity(n))?;
    let mut violations = 0;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..samples {
        let m = crate::synth::random_doubly_stochastic(n, 3.0, rng)?;
        let x = crate::synth::random_doubly_stochastic(n, 3.0, rng)?;
        let margin = cost.evaluate(&cost.compose(&m, &x)?)? - cost.evaluate(&m)?;
        worst_margin = worst_margin.min(margin);
        if margin < -tol {
            violations += 1;
        }
    }
    Ok(MonotonicityReport {
        samples,
        violations,
        worst_margin,
        identity_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_composition_is_addition() {
        let c = AdditiveScalar;
        let a = EdgeMatrix::scalar(1.5).unwrap();
        let b = EdgeMatrix::scalar(2.25).unwrap();
        assert_eq!(c.evaluate(&c.compose(&a, &b).unwrap()).unwrap(), 3.75);
        assert_eq!(c.evaluate(&c.identity(1)).unwrap(), 0.0);
        assert!(c.evaluate(&EdgeMatrix::identity(2)).is_err());
    }

    #[test]
    fn entropy_identity_costs_zero() {
        assert_eq!(TotalEntropy.evaluate(&TotalEntropy.identity(7)).unwrap(), 0.0);
    }

    #[test]
    fn entropy_passes_statistical_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let report = check_monotonicity(&TotalEntropy, 5, 200, 1e-9, &mut rng).unwrap();
        assert!(report.holds(1e-12), "{report:?}");
    }

    /// Negated entropy decreases along paths and must be flagged.
    struct NegEntropy;
    impl PathCost for NegEntropy {
        fn name(&self) -> &str {
            "neg"
        }
        fn evaluate(&self, m: &EdgeMatrix) -> Result<f64> {
            Ok(10.0 - matrix::total_entropy(m)?)
        }
    }

    #[test]
    fn decreasing_cost_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let report = check_monotonicity(&NegEntropy, 4, 50, 1e-9, &mut rng).unwrap();
        assert!(!report.holds(1e-9));
        assert!(report.violations > 0);
    }
}
