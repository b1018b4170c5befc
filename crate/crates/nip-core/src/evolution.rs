//! State and observable evolution, expectation values, and physical norms.
//!
//! States come in ket/double-ket pairs evolving under `G` and `G†`;
//! conservative observables evolve under the commutator flow generated by the
//! Coriolis operator. Expectation values pair the two state realizations, and
//! the frame check maps everything through the Dyson map into the textbook
//! (trivial-metric) frame and compares.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::bundle::ModelBundle;
use crate::error::{Error, Result};
use crate::family::OperatorFamily;
use crate::grid::TimeGrid;
use crate::integrate::rk4_vector;
use crate::metric::Metric;
use crate::operator::SquareOperator;
use crate::residual::ResidualReport;

/// The two complementary realizations of one state at a fixed time.
#[derive(Debug, Clone)]
pub struct StatePair {
    pub ket: Array1<C64>,
    pub double_ket: Array1<C64>,
    pub t: f64,
}

/// A labelled observable family; conservative observables are constant
/// families.
#[derive(Debug, Clone)]
pub struct Observable {
    pub label: String,
    pub family: OperatorFamily,
}

impl Observable {
    pub fn constant(label: impl Into<String>, value: SquareOperator, grid: TimeGrid) -> Self {
        Self { label: label.into(), family: OperatorFamily::constant(grid, value) }
    }
}

fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn vec_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Propagate a ket by `i d|psi>/dt = G(t)|psi>` across the generator's grid.
pub fn evolve_state(
    g: &OperatorFamily,
    psi0: &Array1<C64>,
    steps_per_sample: usize,
) -> Result<Vec<Array1<C64>>> {
    if psi0.len() != g.dim() {
        return Err(Error::DimensionMismatch(psi0.len(), g.dim()));
    }
    if vec_norm(psi0) == 0.0 {
        return Err(Error::InvalidScenario("initial state must be nonzero".into()));
    }
    let minus_i = C64::new(0.0, -1.0);
    rk4_vector(psi0.clone(), g.grid(), steps_per_sample, |t, y| {
        let gt = g.eval(t)?;
        Ok(gt.mat().dot(y).mapv(|z| z * minus_i))
    })
}

/// Propagate a double-ket by `i d|psi>>/dt = G†(t)|psi>>`.
pub fn evolve_costate(
    g: &OperatorFamily,
    psi0_double: &Array1<C64>,
    steps_per_sample: usize,
) -> Result<Vec<Array1<C64>>> {
    if psi0_double.len() != g.dim() {
        return Err(Error::DimensionMismatch(psi0_double.len(), g.dim()));
    }
    if vec_norm(psi0_double) == 0.0 {
        return Err(Error::InvalidScenario("initial state must be nonzero".into()));
    }
    let minus_i = C64::new(0.0, -1.0);
    rk4_vector(psi0_double.clone(), g.grid(), steps_per_sample, |t, y| {
        let gt = g.eval(t)?;
        Ok(gt.adjoint().mat().dot(y).mapv(|z| z * minus_i))
    })
}

/// Heisenberg-type commutator flow of a conservative observable:
/// `i dQ/dt = QΣ - ΣQ`. The flow is a similarity transformation, so the
/// spectrum of `Q` is preserved.
pub fn evolve_observable(
    q0: &SquareOperator,
    sigma: &OperatorFamily,
    steps_per_sample: usize,
) -> Result<OperatorFamily> {
    if q0.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(q0.dim(), sigma.dim()));
    }
    let minus_i = C64::new(0.0, -1.0);
    let values = crate::integrate::rk4_matrix(
        q0.mat().clone(),
        sigma.grid(),
        steps_per_sample,
        |t, y| {
            let s = sigma.eval(t)?;
            let qs = y.dot(s.mat());
            let sq = s.mat().dot(y);
            Ok((&qs - &sq).mapv(|z| z * minus_i))
        },
    )?;
    let ops: Result<Vec<_>> = values.into_iter().map(SquareOperator::new).collect();
    OperatorFamily::from_samples(sigma.grid().clone(), ops?)
}

/// Normalized matrix element `<<psi|Λ|psi> / <<psi|psi>`; for an eigenstate
/// of a quasi-Hermitian observable this is the bare eigenvalue.
pub fn expectation(state: &StatePair, lambda: &SquareOperator) -> Result<C64> {
    if lambda.dim() != state.ket.len() {
        return Err(Error::DimensionMismatch(lambda.dim(), state.ket.len()));
    }
    let den = inner(&state.double_ket, &state.ket);
    let scale = vec_norm(&state.double_ket) * vec_norm(&state.ket);
    if den.norm() <= 1e-12 * scale.max(1.0) {
        return Err(Error::VanishingOverlap(den.norm()));
    }
    let num = inner(&state.double_ket, &lambda.apply(&state.ket));
    Ok(num / den)
}

/// `sqrt(<psi|Θ|psi>)`; real positive for nonzero states and valid metrics,
/// and conserved along consistent evolutions.
pub fn physical_norm(ket: &Array1<C64>, theta: &Metric) -> f64 {
    theta.inner(ket, ket).re.max(0.0).sqrt()
}

/// Compare the prediction of an observable in the working frame against the
/// textbook frame reached through the Dyson map: `λ = ΩΛΩ⁻¹` evaluated in the
/// mapped state `Ωpsi` with the trivial metric. The residual is the largest
/// relative mismatch across the grid.
pub fn hermitian_frame_check(
    bundle: &ModelBundle,
    observable: &Observable,
    psi0: &Array1<C64>,
    steps_per_sample: usize,
) -> Result<ResidualReport> {
    if !observable.family.grid().same_as(bundle.grid()) {
        return Err(Error::InvalidGrid);
    }
    let kets = evolve_state(&bundle.generator, psi0, steps_per_sample)?;
    let dk0 = bundle.metric.value(0).apply(psi0);
    let double_kets = evolve_costate(&bundle.generator, &dk0, steps_per_sample)?;

    let mut residual = 0.0f64;
    for k in 0..bundle.grid().len() {
        let t = bundle.grid().t(k);
        let lambda = observable.family.value(k);
        let pair = StatePair { ket: kets[k].clone(), double_ket: double_kets[k].clone(), t };
        let nip_value = expectation(&pair, lambda)?;

        let omega = bundle.dyson.value(k);
        let mapped_state = omega.apply(&kets[k]);
        let mapped_lambda = &(omega * lambda) * &omega.invert()?;
        let den = inner(&mapped_state, &mapped_state);
        if den.norm() <= 1e-12 {
            return Err(Error::VanishingOverlap(den.norm()));
        }
        let mapped_value = inner(&mapped_state, &mapped_lambda.apply(&mapped_state)) / den;
        residual = residual.max((nip_value - mapped_value).norm() / nip_value.norm().max(1.0));
    }
    Ok(ResidualReport::new(
        format!("frame equivalence [{}]", observable.label),
        residual,
        1e-6,
    ))
}
