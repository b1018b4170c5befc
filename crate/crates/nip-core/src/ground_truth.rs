//! Synthetic reference models with every operator available in closed form.
//!
//! A Hermitian polynomial family `h(t)` is dressed with the exponential gauge
//! `Ω(t) = exp(W(t))`, `W` a Hermitian polynomial, giving the quadruple
//! `H = Ω⁻¹hΩ`, `Σ = iΩ⁻¹Ω̇`, `G = H - Σ`, `Θ = Ω†Ω` with exact analytic
//! time derivatives. Hermitian `W` places the reference Dyson map in the
//! Hermitian-root gauge, so gauge-fixed quantities reconstructed by the
//! strategies can be compared against it directly.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bundle::{DysonTrajectory, MetricFamily};
use crate::error::{Error, Result};
use crate::family::{ClosedForm, GaugeForm, GaugePart, OperatorFamily};
use crate::grid::TimeGrid;
use crate::metric::{assert_metric, DEFAULT_METRIC_EPS};
use crate::operator::{hermiticity_defect, quasi_hermiticity_defect, relative, SquareOperator};
use crate::residual::ResidualReport;

/// Conditioning cap for the drawn gauge.
pub const GAUGE_CONDITION_CAP: f64 = 1e3;
/// Redraws before giving up.
const MAX_ATTEMPTS: usize = 10;
/// Smallest admissible eigenvalue gap of the textbook Hamiltonian across the
/// grid; keeps the drawn models usable by the spectral pipeline.
const GAP_FLOOR: f64 = 5e-2;

/// A reference model with analytic ground truth for all derived operators.
#[derive(Debug, Clone)]
pub struct GroundTruthBundle {
    pub seed: u64,
    /// Hermitian textbook Hamiltonian h(t).
    pub textbook: OperatorFamily,
    /// The gauge Ω(t), Hermitian positive definite per sample.
    pub dyson: DysonTrajectory,
    /// Analytic dΩ/dt.
    pub dyson_dot: OperatorFamily,
    pub hamiltonian: OperatorFamily,
    pub generator: OperatorFamily,
    pub coriolis: OperatorFamily,
    pub metric: MetricFamily,
    /// Θ(t) with its closed form attached, for exact off-sample evaluation.
    pub metric_operators: OperatorFamily,
    /// A(t) = Θ(t)H(t), the Hermitian ansatz completing strategy two.
    pub ansatz: OperatorFamily,
}

impl GroundTruthBundle {
    /// Construction-time identities, all expected at the 1e-10 level:
    /// Hermiticity of h, the additive decomposition, the factorization of Θ,
    /// quasi-Hermiticity of H, and the metric flow against the analytic
    /// derivative of Ω.
    pub fn verify(&self) -> Result<Vec<ResidualReport>> {
        let tol = 1e-10;
        let mut textbook_defect = 0.0f64;
        let mut decomposition = 0.0f64;
        let mut factorization = 0.0f64;
        let mut quasi = 0.0f64;
        let mut flow = 0.0f64;
        let i = C64::new(0.0, 1.0);
        for k in 0..self.textbook.len() {
            textbook_defect = textbook_defect.max(hermiticity_defect(self.textbook.value(k)));

            let h = self.hamiltonian.value(k);
            let split = &(h - self.generator.value(k)) - self.coriolis.value(k);
            decomposition = decomposition.max(relative(split.frobenius_norm(), h.frobenius_norm()));

            let omega = self.dyson.value(k);
            let theta = self.metric.value(k).theta();
            let product = &omega.adjoint() * omega;
            factorization = factorization
                .max((&product - theta).frobenius_norm() / theta.frobenius_norm().max(1.0));

            quasi = quasi.max(quasi_hermiticity_defect(h, self.metric.value(k))?);

            // analytic flow: i(Ω̇†Ω + Ω†Ω̇) = ΘΣ - Σ†Θ
            let omega_dot = self.dyson_dot.value(k);
            let theta_dot = &(&omega_dot.adjoint() * omega) + &(&omega.adjoint() * omega_dot);
            let lhs = theta_dot.scale(i);
            let sigma = self.coriolis.value(k);
            let rhs = &(theta * sigma) - &(&sigma.adjoint() * theta);
            flow = flow.max(relative((&lhs - &rhs).frobenius_norm(), rhs.frobenius_norm()));
        }
        Ok(vec![
            ResidualReport::new("textbook hermiticity", textbook_defect, tol),
            ResidualReport::new("decomposition H-G-Sigma", decomposition, tol),
            ResidualReport::new("metric factorization", factorization, tol),
            ResidualReport::new("quasi-hermiticity of H", quasi, tol),
            ResidualReport::new("analytic metric flow", flow, tol),
        ])
    }
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> SquareOperator {
    let mut mat = Array2::<C64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            mat[(i, j)] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let adj = mat.t().mapv(|z| z.conj());
    let herm = (&mat + &adj).mapv(|z| z * C64::new(0.5 * scale, 0.0));
    SquareOperator::new(herm).expect("finite random entries")
}

fn min_eigen_gap(op: &SquareOperator) -> Result<f64> {
    let (eigs, _) = op.mat().eigh(UPLO::Lower)?;
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let mut gap = f64::INFINITY;
    for pair in sorted.windows(2) {
        gap = gap.min(pair[1] - pair[0]);
    }
    Ok(gap)
}

/// Draw a reference model. Deterministic per seed; draws violating the gauge
/// conditioning cap or the spectral-gap floor are redrawn internally, up to
/// ten times.
pub fn generate_ground_truth(
    seed: u64,
    dim: usize,
    grid: &TimeGrid,
    smoothness_degree: usize,
) -> Result<GroundTruthBundle> {
    if dim == 0 || dim > 16 {
        return Err(Error::InvalidScenario(format!(
            "reference models support 1 <= dim <= 16, got {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_condition = f64::NAN;
    for _attempt in 0..MAX_ATTEMPTS {
        let mut textbook_coeffs = Vec::with_capacity(smoothness_degree + 1);
        let mut gauge_coeffs = Vec::with_capacity(smoothness_degree + 1);
        for k in 0..=smoothness_degree {
            let damp = 0.5f64.powi(k as i32);
            textbook_coeffs.push(random_hermitian(&mut rng, dim, damp));
            gauge_coeffs.push(random_hermitian(&mut rng, dim, 0.3 * damp));
        }

        let part = |p: GaugePart| {
            ClosedForm::Gauge(GaugeForm {
                textbook_coeffs: textbook_coeffs.clone(),
                gauge_coeffs: gauge_coeffs.clone(),
                part: p,
            })
        };
        let textbook = OperatorFamily::from_closed_form(grid.clone(), part(GaugePart::Textbook))?;

        let mut gap = f64::INFINITY;
        for v in textbook.values() {
            gap = gap.min(min_eigen_gap(v)?);
        }
        if gap < GAP_FLOOR {
            continue;
        }

        let dyson_family = OperatorFamily::from_closed_form(grid.clone(), part(GaugePart::Dyson))?;
        let dyson = DysonTrajectory::new(grid.clone(), dyson_family.values().to_vec())?;
        last_condition = dyson.max_condition();
        if last_condition > GAUGE_CONDITION_CAP {
            continue;
        }

        let dyson_dot = OperatorFamily::from_closed_form(grid.clone(), part(GaugePart::DysonDot))?;
        let hamiltonian =
            OperatorFamily::from_closed_form(grid.clone(), part(GaugePart::Hamiltonian))?;
        let generator =
            OperatorFamily::from_closed_form(grid.clone(), part(GaugePart::Generator))?;
        let coriolis = OperatorFamily::from_closed_form(grid.clone(), part(GaugePart::Coriolis))?;
        let metric_operators =
            OperatorFamily::from_closed_form(grid.clone(), part(GaugePart::Metric))?;
        let ansatz = OperatorFamily::from_closed_form(grid.clone(), part(GaugePart::Ansatz))?;

        let mut metrics = Vec::with_capacity(grid.len());
        for v in metric_operators.values() {
            metrics.push(assert_metric(v, DEFAULT_METRIC_EPS)?);
        }
        let metric = MetricFamily::new(grid.clone(), metrics)?;

        return Ok(GroundTruthBundle {
            seed,
            textbook,
            dyson,
            dyson_dot,
            hamiltonian,
            generator,
            coriolis,
            metric,
            metric_operators,
            ansatz,
        });
    }
    Err(Error::ConditionCapExceeded { attempts: MAX_ATTEMPTS, condition: last_condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residual::all_passed;

    fn grid() -> TimeGrid {
        TimeGrid::new(0.0, 1.0, 41).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_ground_truth(7, 4, &grid(), 3).unwrap();
        let b = generate_ground_truth(7, 4, &grid(), 3).unwrap();
        for k in 0..a.hamiltonian.len() {
            assert_eq!(
                (a.hamiltonian.value(k) - b.hamiltonian.value(k)).frobenius_norm(),
                0.0
            );
        }
    }

    #[test]
    fn construction_identities_hold() {
        for seed in [1u64, 2, 3] {
            let bundle = generate_ground_truth(seed, 4, &grid(), 3).unwrap();
            let reports = bundle.verify().unwrap();
            assert!(all_passed(&reports), "seed {seed}: {reports:?}");
        }
    }

    #[test]
    fn gauge_is_hermitian_and_well_conditioned() {
        let bundle = generate_ground_truth(11, 6, &grid(), 2).unwrap();
        assert!(bundle.dyson.max_condition() <= GAUGE_CONDITION_CAP);
        for v in bundle.dyson.values() {
            assert!(hermiticity_defect(v) < 1e-12);
        }
    }

    #[test]
    fn ansatz_is_hermitian() {
        let bundle = generate_ground_truth(5, 4, &grid(), 3).unwrap();
        for v in bundle.ansatz.values() {
            assert!(hermiticity_defect(v) < 1e-12);
        }
    }

    #[test]
    fn rejects_oversized_dimension() {
        assert!(matches!(
            generate_ground_truth(1, 17, &grid(), 2),
            Err(Error::InvalidScenario(_))
        ));
    }

    #[test]
    fn derivative_of_gauge_matches_finite_differences() {
        let bundle = generate_ground_truth(13, 3, &grid(), 3).unwrap();
        let family = bundle.dyson.to_family();
        let k = family.len() / 2;
        let fd = family.time_derivative(k).unwrap();
        let analytic = bundle.dyson_dot.value(k);
        let h = family.grid().step();
        let err = (&fd - analytic).frobenius_norm();
        assert!(err < 2.0 * h * h, "finite-difference mismatch {err}");
    }
}
