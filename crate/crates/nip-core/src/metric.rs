//! The physical inner-product metric and its Hermitian square root.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::{hermiticity_defect, SquareOperator};

/// Default acceptance threshold for metric validation.
pub const DEFAULT_METRIC_EPS: f64 = 1e-10;

/// A Hermitian positive-definite metric Θ defining the physical inner product
/// `<phi|Θ|psi>`.
///
/// `kappa` records the positive spectral weights when the metric was assembled
/// from a biorthonormal system; metrics produced directly (for example as
/// Ω†Ω) carry no weight vector.
#[derive(Debug, Clone)]
pub struct Metric {
    theta: SquareOperator,
    kappa: Option<Vec<f64>>,
    pd_margin: f64,
}

impl Metric {
    pub fn theta(&self) -> &SquareOperator {
        &self.theta
    }

    pub fn kappa(&self) -> Option<&[f64]> {
        self.kappa.as_deref()
    }

    /// Smallest eigenvalue of Θ; strictly positive for every valid metric.
    pub fn pd_margin(&self) -> f64 {
        self.pd_margin
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub(crate) fn with_kappa(mut self, kappa: Vec<f64>) -> Self {
        self.kappa = Some(kappa);
        self
    }

    /// Θ applied from the left: `Θ psi`.
    pub fn apply(&self, v: &ndarray::Array1<C64>) -> ndarray::Array1<C64> {
        self.theta.apply(v)
    }

    /// The weighted inner product `<phi|Θ|psi>`.
    pub fn inner(&self, phi: &ndarray::Array1<C64>, psi: &ndarray::Array1<C64>) -> C64 {
        phi.iter()
            .zip(self.theta.apply(psi).iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn hermitian_eigensystem(m: &SquareOperator) -> Result<(Vec<f64>, Array2<C64>)> {
    let sym = m.mat().t().mapv(|z| z.conj());
    let half: Array2<C64> = (m.mat() + &sym).mapv(|z| z * C64::new(0.5, 0.0));
    let (w, v) = half.eigh(UPLO::Lower)?;
    Ok((w.to_vec(), v))
}

/// Validate a candidate metric: Hermitian within `eps` and positive definite
/// with margin above `eps * |Θ|_F`.
pub fn assert_metric(theta: &SquareOperator, eps: f64) -> Result<Metric> {
    let defect = hermiticity_defect(theta);
    if defect > eps {
        return Err(Error::NotHermitian { defect, tolerance: eps });
    }
    let (eigs, _) = hermitian_eigensystem(theta)?;
    let margin = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    if margin <= eps * theta.frobenius_norm() {
        return Err(Error::NotPositiveDefinite { margin });
    }
    Ok(Metric { theta: theta.clone(), kappa: None, pd_margin: margin })
}

/// The unique Hermitian positive-definite root Ω with Ω² = Θ, via the
/// eigendecomposition of Θ.
pub fn hermitian_sqrt(theta: &Metric) -> Result<SquareOperator> {
    let (eigs, vectors) = hermitian_eigensystem(theta.theta())?;
    if let Some(bad) = eigs.iter().copied().find(|x| *x <= 0.0) {
        return Err(Error::NotPositiveDefinite { margin: bad });
    }
    let n = theta.dim();
    let mut root = Array2::<C64>::zeros((n, n));
    for (k, lam) in eigs.iter().enumerate() {
        let s = lam.sqrt();
        let col = vectors.column(k);
        for i in 0..n {
            for j in 0..n {
                root[(i, j)] += col[i] * col[j].conj() * s;
            }
        }
    }
    // symmetrize away the roundoff skew so the root is Hermitian exactly
    let adj = root.t().mapv(|z| z.conj());
    let sym = (&root + &adj).mapv(|z| z * C64::new(0.5, 0.0));
    SquareOperator::new(sym)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[f64]) -> SquareOperator {
        let cs: Vec<C64> = entries.iter().map(|x| C64::new(*x, 0.0)).collect();
        SquareOperator::diagonal(&cs)
    }

    #[test]
    fn accepts_diagonal_metric() {
        let m = assert_metric(&diag(&[1.0, 4.0]), 1e-10).unwrap();
        assert!((m.pd_margin() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn accepts_identity() {
        let m = assert_metric(&SquareOperator::identity(3), 1e-10).unwrap();
        assert!((m.pd_margin() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let err = assert_metric(&diag(&[1.0, -1.0]), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = SquareOperator::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let err = assert_metric(&m, 1e-10).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = assert_metric(&diag(&[1.0, 4.0]), 1e-10).unwrap();
        let root = hermitian_sqrt(&m).unwrap();
        assert!((&root - &diag(&[1.0, 2.0])).frobenius_norm() < 1e-13);
    }

    #[test]
    fn sqrt_of_identity() {
        let m = assert_metric(&SquareOperator::identity(4), 1e-10).unwrap();
        let root = hermitian_sqrt(&m).unwrap();
        assert!((&root - &SquareOperator::identity(4)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        let theta =
            SquareOperator::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let m = assert_metric(&theta, 1e-10).unwrap();
        let root = hermitian_sqrt(&m).unwrap();
        let squared = &root * &root;
        assert!((&squared - &theta).frobenius_norm() <= 1e-12 * theta.frobenius_norm());
        assert_eq!(crate::operator::hermiticity_defect(&root), 0.0);
    }

    #[test]
    fn sqrt_round_trip_on_constructed_root() {
        let omega =
            SquareOperator::from_real_rows(&[vec![1.5, 0.25], vec![0.25, 0.75]]).unwrap();
        let theta = &omega * &omega;
        let m = assert_metric(&theta, 1e-10).unwrap();
        let recovered = hermitian_sqrt(&m).unwrap();
        assert!((&recovered - &omega).frobenius_norm() < 1e-10 * omega.frobenius_norm().max(1.0));
    }
}
