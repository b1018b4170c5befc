//! Kinematical-input reconstruction: the Coriolis family `Σ(t)` is given, the
//! Dyson map is integrated from `i dΩ/dt = Ω Σ`, the metric is the product
//! `Θ = Ω†Ω`, and the Hamiltonians come from a Hermitian ansatz through
//! `H = Θ⁻¹A`, `G = H - Σ`.

use num_complex::Complex64 as C64;

use crate::bundle::{
    standard_diagnostics, DysonTrajectory, GaugeTag, MetricFamily, ModelBundle, StrategyTag,
};
use crate::error::{Error, Result};
use crate::family::OperatorFamily;
use crate::integrate::rk4_matrix;
use crate::operator::{hermiticity_defect, relative, SquareOperator};
use crate::residual::ResidualReport;

/// Relative Hermiticity tolerance for ansatz validation.
pub const ANSATZ_TOL: f64 = 1e-10;

/// A Hermitian operator family supplying the dynamical content missing from
/// the kinematical input.
///
/// Validation is strict by default; opting into symmetrization replaces every
/// sample by its Hermitian part and keeps the original defect on record.
#[derive(Debug, Clone)]
pub struct HermitianAnsatz {
    family: OperatorFamily,
    symmetrized: bool,
    original_defect: f64,
}

impl HermitianAnsatz {
    pub fn new(family: OperatorFamily) -> Result<Self> {
        let defect =
            family.values().iter().map(hermiticity_defect).fold(0.0, f64::max);
        if defect > ANSATZ_TOL {
            return Err(Error::NotHermitianAnsatz { defect, tolerance: ANSATZ_TOL });
        }
        Ok(Self { family, symmetrized: false, original_defect: defect })
    }

    /// Accept noisy data by replacing each sample with `(A + A†)/2`.
    pub fn symmetrized(family: OperatorFamily) -> Result<Self> {
        let defect = family.values().iter().map(hermiticity_defect).fold(0.0, f64::max);
        let half = C64::new(0.5, 0.0);
        let sym = OperatorFamily::from_samples(
            family.grid().clone(),
            family
                .values()
                .iter()
                .map(|a| (&(a + &a.adjoint())).scale(half))
                .collect(),
        )?;
        Ok(Self { family: sym, symmetrized: true, original_defect: defect })
    }

    pub fn family(&self) -> &OperatorFamily {
        &self.family
    }

    pub fn was_symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn original_defect(&self) -> f64 {
        self.original_defect
    }
}

/// Integrate `i dΩ/dt = Ω Σ` from `omega0` across the grid of `sigma`, taking
/// `steps_per_sample` fourth-order substeps between samples. No drift
/// correction is applied; conditioning is tracked on the trajectory.
pub fn integrate_dyson(
    sigma: &OperatorFamily,
    omega0: &SquareOperator,
    steps_per_sample: usize,
) -> Result<DysonTrajectory> {
    if omega0.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(omega0.dim(), sigma.dim()));
    }
    let cond = omega0.condition_estimate()?;
    if !cond.is_finite() || cond > crate::operator::CONDITION_CAP {
        return Err(Error::IllConditioned(cond));
    }
    let minus_i = C64::new(0.0, -1.0);
    let values = rk4_matrix(omega0.mat().clone(), sigma.grid(), steps_per_sample, |t, y| {
        let s = sigma.eval(t)?;
        Ok(y.dot(s.mat()).mapv(|z| z * minus_i))
    })?;
    let ops: Result<Vec<_>> = values.into_iter().map(SquareOperator::new).collect();
    DysonTrajectory::new(sigma.grid().clone(), ops?)
}

/// Integrate the conjugate problem `i dΩ†/dt = -Σ† Ω†` independently; serves
/// as a cross-check against the adjoint of [`integrate_dyson`].
pub fn integrate_dyson_adjoint(
    sigma: &OperatorFamily,
    omega0_dagger: &SquareOperator,
    steps_per_sample: usize,
) -> Result<DysonTrajectory> {
    if omega0_dagger.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(omega0_dagger.dim(), sigma.dim()));
    }
    let plus_i = C64::new(0.0, 1.0);
    let values =
        rk4_matrix(omega0_dagger.mat().clone(), sigma.grid(), steps_per_sample, |t, y| {
            let s = sigma.eval(t)?;
            Ok(s.adjoint().mat().dot(y).mapv(|z| z * plus_i))
        })?;
    let ops: Result<Vec<_>> = values.into_iter().map(SquareOperator::new).collect();
    DysonTrajectory::new(sigma.grid().clone(), ops?)
}

/// Largest relative deviation between the adjoint-equation trajectory and the
/// conjugate of the direct trajectory.
pub fn conjugacy_residual(direct: &DysonTrajectory, adjoint: &DysonTrajectory) -> f64 {
    direct
        .values()
        .iter()
        .zip(adjoint.values().iter())
        .map(|(d, a)| relative((a - &d.adjoint()).frobenius_norm(), d.frobenius_norm()))
        .fold(0.0, f64::max)
}

/// Per-sample metric `Θ(t_k) = Ω†(t_k)Ω(t_k)`, validated sample by sample.
pub fn metric_from_dyson(omega: &DysonTrajectory) -> Result<MetricFamily> {
    omega.metric_family()
}

/// Complete the model: `H = Θ⁻¹A` and `G = H - Σ` on the trajectory's grid.
/// The quasi-Hermiticity of `H` holds by construction and is reported, not
/// assumed.
pub fn hamiltonians_from_ansatz(
    omega: &DysonTrajectory,
    sigma: &OperatorFamily,
    ansatz: &HermitianAnsatz,
) -> Result<ModelBundle> {
    if !omega.grid().same_as(sigma.grid()) || !omega.grid().same_as(ansatz.family().grid()) {
        return Err(Error::InvalidGrid);
    }
    if omega.dim() != ansatz.family().dim() {
        return Err(Error::DimensionMismatch(omega.dim(), ansatz.family().dim()));
    }
    let metric = metric_from_dyson(omega)?;
    let mut h_values = Vec::with_capacity(omega.len());
    for k in 0..omega.len() {
        let theta_inv = metric.value(k).theta().invert()?;
        h_values.push(&theta_inv * ansatz.family().value(k));
    }
    let hamiltonian = OperatorFamily::from_samples(omega.grid().clone(), h_values)?;
    let generator = hamiltonian.zip_with(sigma, |h, s| h - s)?;

    let mut diagnostics =
        standard_diagnostics(&hamiltonian, &generator, sigma, &metric, omega)?;
    if ansatz.was_symmetrized() {
        diagnostics.push(ResidualReport::new(
            "ansatz symmetrization (original defect)",
            ansatz.original_defect(),
            f64::INFINITY,
        ));
    }
    diagnostics.push(ResidualReport::new(
        "trajectory conditioning",
        omega.max_condition(),
        crate::operator::CONDITION_CAP,
    ));

    Ok(ModelBundle {
        strategy: StrategyTag::Two,
        gauge: GaugeTag::Integrated,
        hamiltonian,
        generator,
        coriolis: sigma.clone(),
        metric,
        dyson: omega.clone(),
        diagnostics,
    })
}

#[derive(Debug, Clone)]
pub struct StrategyTwoOptions {
    pub steps_per_sample: usize,
    /// Also integrate the conjugate problem and report the conjugacy residual.
    pub adjoint_check: bool,
}

impl Default for StrategyTwoOptions {
    fn default() -> Self {
        Self { steps_per_sample: 1, adjoint_check: false }
    }
}

/// Full kinematical pipeline: integrate the Dyson map, form the metric, and
/// complete the Hamiltonians from the ansatz.
pub fn run_strategy_two(
    sigma: &OperatorFamily,
    ansatz: &HermitianAnsatz,
    omega0: Option<&SquareOperator>,
    options: &StrategyTwoOptions,
) -> Result<ModelBundle> {
    let identity = SquareOperator::identity(sigma.dim());
    let omega0 = omega0.unwrap_or(&identity);
    let dyson = integrate_dyson(sigma, omega0, options.steps_per_sample)?;
    let mut bundle = hamiltonians_from_ansatz(&dyson, sigma, ansatz)?;
    if options.adjoint_check {
        let adjoint =
            integrate_dyson_adjoint(sigma, &omega0.adjoint(), options.steps_per_sample)?;
        bundle.diagnostics.push(ResidualReport::new(
            "dyson conjugacy cross-check",
            conjugacy_residual(&dyson, &adjoint),
            1e-8,
        ));
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn coriolis_family(samples: usize) -> OperatorFamily {
        // Σ = i diag(0, 1), constant
        let sigma = SquareOperator::diagonal(&[c(0.0, 0.0), c(0.0, 1.0)]);
        OperatorFamily::constant(TimeGrid::new(0.0, 1.0, samples).unwrap(), sigma)
    }

    #[test]
    fn zero_generator_freezes_the_map() {
        let sigma = OperatorFamily::constant(
            TimeGrid::new(0.0, 1.0, 11).unwrap(),
            SquareOperator::zeros(2),
        );
        let omega0 = SquareOperator::from_real_rows(&[vec![1.0, 0.5], vec![0.0, 2.0]]).unwrap();
        let traj = integrate_dyson(&sigma, &omega0, 10).unwrap();
        for v in traj.values() {
            assert_eq!((v - &omega0).frobenius_norm(), 0.0);
        }
    }

    #[test]
    fn constant_generator_exponential() {
        // Ω(t) = Ω0 exp(-i Σ t) = diag(1, e^t) from the identity
        let traj = integrate_dyson(&coriolis_family(1001), &SquareOperator::identity(2), 1).unwrap();
        let expected = SquareOperator::diagonal(&[c(1.0, 0.0), c(1f64.exp(), 0.0)]);
        let err = (traj.values().last().unwrap() - &expected).frobenius_norm();
        assert!(err < 1e-9, "final error {err}");
    }

    #[test]
    fn scaled_initial_value_scales_the_solution() {
        let omega0 = SquareOperator::diagonal(&[c(2.0, 0.0), c(1.0, 0.0)]);
        let traj = integrate_dyson(&coriolis_family(1001), &omega0, 1).unwrap();
        let g = traj.grid().clone();
        for k in (0..g.len()).step_by(250) {
            let expected = SquareOperator::diagonal(&[c(2.0, 0.0), c(g.t(k).exp(), 0.0)]);
            assert!((traj.value(k) - &expected).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn adjoint_route_matches_conjugate() {
        let traj = integrate_dyson(&coriolis_family(501), &SquareOperator::identity(2), 2).unwrap();
        let adj =
            integrate_dyson_adjoint(&coriolis_family(501), &SquareOperator::identity(2), 2)
                .unwrap();
        // Σ† = -i diag(0,1) flips the sign twice: Ω†(t) = diag(1, e^t) again
        let expected = SquareOperator::diagonal(&[c(1.0, 0.0), c(1f64.exp(), 0.0)]);
        assert!((adj.values().last().unwrap() - &expected).frobenius_norm() < 1e-9);
        assert!(conjugacy_residual(&traj, &adj) < 1e-10);
    }

    #[test]
    fn fourth_order_step_scaling() {
        // global error at t=1 falls like h^4: ratios ~16 between
        // h = 1e-2, 5e-3, 2.5e-3
        let expected = SquareOperator::diagonal(&[c(1.0, 0.0), c(1f64.exp(), 0.0)]);
        let mut errors = Vec::new();
        for samples in [101usize, 201, 401] {
            let traj =
                integrate_dyson(&coriolis_family(samples), &SquareOperator::identity(2), 1)
                    .unwrap();
            errors.push((traj.values().last().unwrap() - &expected).frobenius_norm());
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(ratio > 8.0 && ratio < 32.0, "order-4 scaling violated: {ratio}");
        }
    }

    #[test]
    fn metric_recovers_diagonal_product() {
        let traj = integrate_dyson(&coriolis_family(101), &SquareOperator::identity(2), 10).unwrap();
        let metric = metric_from_dyson(&traj).unwrap();
        let g = traj.grid().clone();
        for k in (0..g.len()).step_by(20) {
            let expected =
                SquareOperator::diagonal(&[c(1.0, 0.0), c((2.0 * g.t(k)).exp(), 0.0)]);
            let err = (metric.value(k).theta() - &expected).frobenius_norm()
                / expected.frobenius_norm();
            assert!(err < 1e-9);
        }
    }

    #[test]
    fn constant_omega_gives_constant_metric() {
        let omega = SquareOperator::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let grid = TimeGrid::new(0.0, 1.0, 5).unwrap();
        let traj = DysonTrajectory::new(grid, vec![omega; 5]).unwrap();
        let metric = metric_from_dyson(&traj).unwrap();
        let expected = SquareOperator::diagonal(&[c(1.0, 0.0), c(4.0, 0.0)]);
        for k in 0..5 {
            assert!((metric.value(k).theta() - &expected).frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn ansatz_completes_the_model() {
        // A = [[0,2],[2,0]] against Θ(t) = diag(1, e^{2t}):
        // H(t) = [[0,2],[2 e^{-2t},0]]
        let grid = TimeGrid::new(0.0, 1.0, 501).unwrap();
        let a = SquareOperator::from_real_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let ansatz = HermitianAnsatz::new(OperatorFamily::constant(grid.clone(), a)).unwrap();
        let sigma = coriolis_family(501);
        let bundle =
            run_strategy_two(&sigma, &ansatz, None, &StrategyTwoOptions::default()).unwrap();
        for k in (0..grid.len()).step_by(100) {
            let t = grid.t(k);
            let expected = SquareOperator::from_real_rows(&[
                vec![0.0, 2.0],
                vec![2.0 * (-2.0 * t).exp(), 0.0],
            ])
            .unwrap();
            let err = (bundle.hamiltonian.value(k) - &expected).frobenius_norm()
                / expected.frobenius_norm();
            assert!(err < 1e-8, "hamiltonian error {err} at t={t}");
        }
        assert!(bundle.all_checks_passed());
    }

    #[test]
    fn trivial_metric_returns_the_ansatz() {
        let grid = TimeGrid::new(0.0, 1.0, 11).unwrap();
        let a = SquareOperator::from_real_rows(&[vec![1.0, 0.5], vec![0.5, -1.0]]).unwrap();
        let ansatz =
            HermitianAnsatz::new(OperatorFamily::constant(grid.clone(), a.clone())).unwrap();
        let sigma = OperatorFamily::constant(grid.clone(), SquareOperator::zeros(2));
        let bundle =
            run_strategy_two(&sigma, &ansatz, None, &StrategyTwoOptions::default()).unwrap();
        for k in 0..11 {
            assert!((bundle.hamiltonian.value(k) - &a).frobenius_norm() < 1e-12);
            assert!(
                (bundle.metric.value(k).theta() - &SquareOperator::identity(2)).frobenius_norm()
                    < 1e-12
            );
        }
    }

    #[test]
    fn stationary_generator_freezes_metric_exactly() {
        // Σ = 0: every Runge-Kutta increment vanishes identically, so the
        // metric cannot move even by roundoff.
        let grid = TimeGrid::new(0.0, 1.0, 101).unwrap();
        let sigma = OperatorFamily::constant(grid.clone(), SquareOperator::zeros(2));
        let omega0 = SquareOperator::from_real_rows(&[vec![1.0, 0.25], vec![0.25, 2.0]]).unwrap();
        let traj = integrate_dyson(&sigma, &omega0, 10).unwrap();
        let metric = metric_from_dyson(&traj).unwrap();
        let first = metric.value(0).theta().clone();
        for k in 0..grid.len() {
            assert_eq!((metric.value(k).theta() - &first).frobenius_norm(), 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian_ansatz() {
        let grid = TimeGrid::new(0.0, 1.0, 3).unwrap();
        let bad = SquareOperator::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let family = OperatorFamily::constant(grid, bad);
        assert!(matches!(
            HermitianAnsatz::new(family.clone()),
            Err(Error::NotHermitianAnsatz { .. })
        ));
        let fixed = HermitianAnsatz::symmetrized(family).unwrap();
        assert!(fixed.was_symmetrized());
        assert!(fixed.original_defect() > 0.1);
        assert!(hermiticity_defect(fixed.family().value(0)) < 1e-15);
    }

    #[test]
    fn blow_up_surfaces_as_error() {
        // Σ = i K with K positive makes Ω grow like exp(Kt); a huge K
        // overruns the cap quickly.
        let k = SquareOperator::diagonal(&[c(0.0, 60.0), c(0.0, 60.0)]);
        let grid = TimeGrid::new(0.0, 1.0, 11).unwrap();
        let sigma = OperatorFamily::constant(grid, k);
        let err = integrate_dyson(&sigma, &SquareOperator::identity(2), 20).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }
}
