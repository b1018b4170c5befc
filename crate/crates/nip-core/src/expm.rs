//! Complex matrix exponential via Padé approximation with scaling and
//! squaring, plus its directional (Fréchet) derivative.

use ndarray::Array2;
use ndarray_linalg::Inverse;
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::operator::SquareOperator;

// Degree-13 Padé coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

fn expm_raw(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil().max(0.0) as u32 } else { 0 };
    let scale = C64::new(1.0 / 2f64.powi(s as i32), 0.0);
    let a = a.mapv(|z| z * scale);

    let eye: Array2<C64> = Array2::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let u_inner = a6.mapv(|z| z * b(13)) + a4.mapv(|z| z * b(11)) + a2.mapv(|z| z * b(9));
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|z| z * b(7))
        + a4.mapv(|z| z * b(5))
        + a2.mapv(|z| z * b(3))
        + eye.mapv(|z| z * b(1));
    let u = a.dot(&u_poly);

    let v_inner = a6.mapv(|z| z * b(12)) + a4.mapv(|z| z * b(10)) + a2.mapv(|z| z * b(8));
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * b(6))
        + a4.mapv(|z| z * b(4))
        + a2.mapv(|z| z * b(2))
        + eye.mapv(|z| z * b(0));

    let denom = &v - &u;
    let numer = &v + &u;
    let mut result = denom.inv()?.dot(&numer);
    for _ in 0..s {
        result = result.dot(&result);
    }
    Ok(result)
}

/// `exp(A)`.
pub fn expm(a: &SquareOperator) -> Result<SquareOperator> {
    SquareOperator::new(expm_raw(a.mat())?)
}

/// `exp(A)` together with the Fréchet derivative of the exponential at `A` in
/// direction `E`, i.e. `d/ds exp(A + sE)` at `s = 0`.
///
/// Computed from the block identity
/// `exp([[A, E], [0, A]]) = [[exp(A), L(A, E)], [0, exp(A)]]`.
pub fn expm_with_derivative(
    a: &SquareOperator,
    direction: &SquareOperator,
) -> Result<(SquareOperator, SquareOperator)> {
    a.check_dim(direction)?;
    let n = a.dim();
    let mut block = Array2::<C64>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            block[(i, j)] = a.mat()[(i, j)];
            block[(n + i, n + j)] = a.mat()[(i, j)];
            block[(i, n + j)] = direction.mat()[(i, j)];
        }
    }
    let big = expm_raw(&block)?;
    let mut value = Array2::<C64>::zeros((n, n));
    let mut deriv = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            value[(i, j)] = big[(i, j)];
            deriv[(i, j)] = big[(i, n + j)];
        }
    }
    Ok((SquareOperator::new(value)?, SquareOperator::new(deriv)?))
}
