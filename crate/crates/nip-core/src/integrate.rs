//! Fixed-step classical fourth-order integration for matrix- and vector-valued
//! initial value problems on a uniform grid.
//!
//! Integration produces one value per grid sample, taking `steps_per_sample`
//! substeps between consecutive samples. The right-hand side may read the
//! driving operator family at arbitrary stage times (exact for closed-form
//! families, interpolated otherwise). Norms are monitored against a hard cap;
//! nothing is renormalized behind the caller's back.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Hard norm cap signalling runaway integration.
pub const BLOWUP_CAP: f64 = 1e12;

fn frob(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn vec_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// March a matrix-valued IVP across `grid`, returning the value at every grid
/// sample (the first entry is `y0` itself).
pub fn rk4_matrix<F>(
    y0: Array2<C64>,
    grid: &TimeGrid,
    steps_per_sample: usize,
    mut rhs: F,
) -> Result<Vec<Array2<C64>>>
where
    F: FnMut(f64, &Array2<C64>) -> Result<Array2<C64>>,
{
    let steps = steps_per_sample.max(1);
    let h = grid.step() / steps as f64;
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0;
    out.push(y.clone());
    for k in 0..grid.len() - 1 {
        for s in 0..steps {
            let t = grid.t(k) + s as f64 * h;
            let k1 = rhs(t, &y)?;
            let k2 = rhs(t + h / 2.0, &(&y + &(&k1 * C64::new(h / 2.0, 0.0))))?;
            let k3 = rhs(t + h / 2.0, &(&y + &(&k2 * C64::new(h / 2.0, 0.0))))?;
            let k4 = rhs(t + h, &(&y + &(&k3 * C64::new(h, 0.0))))?;
            let increment = (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
                * C64::new(h / 6.0, 0.0);
            y = &y + &increment;
        }
        let norm = frob(&y);
        if !norm.is_finite() || norm > BLOWUP_CAP {
            return Err(Error::BlowUp { t: grid.t(k + 1), norm, cap: BLOWUP_CAP });
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// March a vector-valued IVP across `grid`; same stepping rules as
/// [`rk4_matrix`].
pub fn rk4_vector<F>(
    y0: Array1<C64>,
    grid: &TimeGrid,
    steps_per_sample: usize,
    mut rhs: F,
) -> Result<Vec<Array1<C64>>>
where
    F: FnMut(f64, &Array1<C64>) -> Result<Array1<C64>>,
{
    let steps = steps_per_sample.max(1);
    let h = grid.step() / steps as f64;
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0;
    out.push(y.clone());
    for k in 0..grid.len() - 1 {
        for s in 0..steps {
            let t = grid.t(k) + s as f64 * h;
            let k1 = rhs(t, &y)?;
            let k2 = rhs(t + h / 2.0, &(&y + &(&k1 * C64::new(h / 2.0, 0.0))))?;
            let k3 = rhs(t + h / 2.0, &(&y + &(&k2 * C64::new(h / 2.0, 0.0))))?;
            let k4 = rhs(t + h, &(&y + &(&k3 * C64::new(h, 0.0))))?;
            let increment = (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
                * C64::new(h / 6.0, 0.0);
            y = &y + &increment;
        }
        let norm = vec_norm(&y);
        if !norm.is_finite() || norm > BLOWUP_CAP {
            return Err(Error::BlowUp { t: grid.t(k + 1), norm, cap: BLOWUP_CAP });
        }
        out.push(y.clone());
    }
    Ok(out)
}
