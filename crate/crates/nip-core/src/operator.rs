//! Dense complex square operators and the residual functionals shared by all
//! reconstruction strategies.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Inverse, SVD};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Condition-number cap for [`SquareOperator::invert`]. An engineering choice:
/// beyond this the inverse carries no trustworthy digits at f64 precision.
pub const CONDITION_CAP: f64 = 1e12;

/// An N x N complex operator on the working (computational) space.
///
/// All operators of the theory — Hamiltonians, generators, Dyson maps,
/// metrics, observables — are values of this type; the entries are finite and
/// the matrix is square by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareOperator {
    mat: Array2<C64>,
}

impl SquareOperator {
    pub fn new(mat: Array2<C64>) -> Result<Self> {
        let (rows, cols) = mat.dim();
        if rows != cols || rows == 0 {
            return Err(Error::DimensionMismatch(rows, cols));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        Ok(Self { mat })
    }

    /// Build from row-major complex rows; convenience for literals in tests
    /// and fixtures.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let mut mat = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(n, row.len()));
            }
            for (j, z) in row.iter().enumerate() {
                mat[(i, j)] = *z;
            }
        }
        Self::new(mat)
    }

    /// Build from real row-major entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| C64::new(*x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: Array2::eye(dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: Array2::zeros((dim, dim)) }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let d: Array1<C64> = entries.iter().copied().collect();
        Self { mat: Array2::from_diag(&d) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_mat(self) -> Array2<C64> {
        self.mat
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.t().mapv(|z| z.conj()) }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { mat: self.mat.mapv(|z| z * c) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().iter().sum()
    }

    /// Apply the operator to a column vector.
    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.mat.dot(v)
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// Estimated 2-norm condition number via singular values.
    pub fn condition_estimate(&self) -> Result<f64> {
        let (_, sv, _) = self.mat.svd(false, false)?;
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if smin <= 0.0 || !smin.is_finite() {
            return Ok(f64::INFINITY);
        }
        Ok(smax / smin)
    }

    /// LU inverse, rejected when the condition estimate exceeds
    /// [`CONDITION_CAP`].
    pub fn invert(&self) -> Result<Self> {
        let cond = self.condition_estimate()?;
        if !cond.is_finite() || cond > CONDITION_CAP {
            return Err(Error::IllConditioned(cond));
        }
        let inv = self.mat.inv()?;
        Self::new(inv)
    }
}

impl std::ops::Add for &SquareOperator {
    type Output = SquareOperator;
    fn add(self, rhs: &SquareOperator) -> SquareOperator {
        SquareOperator { mat: &self.mat + &rhs.mat }
    }
}

impl std::ops::Sub for &SquareOperator {
    type Output = SquareOperator;
    fn sub(self, rhs: &SquareOperator) -> SquareOperator {
        SquareOperator { mat: &self.mat - &rhs.mat }
    }
}

/// Matrix product.
impl std::ops::Mul for &SquareOperator {
    type Output = SquareOperator;
    fn mul(self, rhs: &SquareOperator) -> SquareOperator {
        SquareOperator { mat: self.mat.dot(&rhs.mat) }
    }
}

impl std::ops::Neg for &SquareOperator {
    type Output = SquareOperator;
    fn neg(self) -> SquareOperator {
        SquareOperator { mat: self.mat.mapv(|z| -z) }
    }
}

/// Commutator `[A, B] = AB - BA`.
pub fn commutator(a: &SquareOperator, b: &SquareOperator) -> SquareOperator {
    &(a * b) - &(b * a)
}

/// Relative size of `value` against `scale`, guarded against tiny scales.
pub fn relative(value: f64, scale: f64) -> f64 {
    value / scale.max(1.0)
}

/// `|M - M†|_F / max(1, |M|_F)`; zero exactly for Hermitian input.
pub fn hermiticity_defect(m: &SquareOperator) -> f64 {
    let diff = m - &m.adjoint();
    relative(diff.frobenius_norm(), m.frobenius_norm())
}

/// `|M†Θ - ΘM|_F / max(1, |ΘM|_F)`.
///
/// Vanishes exactly when `M` is self-adjoint in the Θ-weighted inner product;
/// with `Θ = I` it reduces to [`hermiticity_defect`] identically.
pub fn quasi_hermiticity_defect(m: &SquareOperator, theta: &crate::metric::Metric) -> Result<f64> {
    let th = theta.theta();
    m.check_dim(th)?;
    let theta_m = th * m;
    let defect = &(&m.adjoint() * th) - &theta_m;
    Ok(relative(defect.frobenius_norm(), theta_m.frobenius_norm()))
}
