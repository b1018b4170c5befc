//! Reconstructed model quadruples and their shared diagnostics.

use crate::error::{Error, Result};
use crate::family::OperatorFamily;
use crate::grid::TimeGrid;
use crate::metric::{assert_metric, Metric, DEFAULT_METRIC_EPS};
use crate::operator::{quasi_hermiticity_defect, relative, SquareOperator};
use crate::residual::ResidualReport;

/// Which input the bundle was reconstructed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyTag {
    One,
    Two,
    Three,
}

impl std::fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StrategyTag::One => write!(f, "one"),
            StrategyTag::Two => write!(f, "two"),
            StrategyTag::Three => write!(f, "three"),
        }
    }
}

/// How the Dyson factor of the metric was fixed. Any Ω with Ω†Ω = Θ is
/// admissible; the reported Σ and G depend on this choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeTag {
    /// Ω = Θ^{1/2}, the unique Hermitian positive root.
    HermitianRoot,
    /// Ω integrated from an initial value; the gauge is the initial value.
    Integrated,
}

impl std::fmt::Display for GaugeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GaugeTag::HermitianRoot => write!(f, "hermitian-root"),
            GaugeTag::Integrated => write!(f, "integrated"),
        }
    }
}

/// Time-indexed invertible Dyson map with conditioning diagnostics.
#[derive(Debug, Clone)]
pub struct DysonTrajectory {
    grid: TimeGrid,
    values: Vec<SquareOperator>,
    max_condition: f64,
}

impl DysonTrajectory {
    pub fn new(grid: TimeGrid, values: Vec<SquareOperator>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(values.len(), grid.len()));
        }
        let mut max_condition = 0.0f64;
        for v in &values {
            max_condition = max_condition.max(v.condition_estimate()?);
        }
        Ok(Self { grid, values, max_condition })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, k: usize) -> &SquareOperator {
        &self.values[k]
    }

    pub fn values(&self) -> &[SquareOperator] {
        &self.values
    }

    /// Largest 2-norm condition estimate along the trajectory.
    pub fn max_condition(&self) -> f64 {
        self.max_condition
    }

    pub fn to_family(&self) -> OperatorFamily {
        OperatorFamily::from_samples(self.grid.clone(), self.values.clone())
            .expect("trajectory samples match its grid")
    }

    /// Per-sample metric Θ(t) = Ω†(t)Ω(t); fails if the product has lost
    /// positivity, which signals blow-up or loss of invertibility upstream.
    pub fn metric_family(&self) -> Result<MetricFamily> {
        let mut metrics = Vec::with_capacity(self.len());
        for v in &self.values {
            let theta = &v.adjoint() * v;
            metrics.push(assert_metric(&theta, DEFAULT_METRIC_EPS)?);
        }
        MetricFamily::new(self.grid.clone(), metrics)
    }
}

/// One validated metric per grid sample.
#[derive(Debug, Clone)]
pub struct MetricFamily {
    grid: TimeGrid,
    values: Vec<Metric>,
}

impl MetricFamily {
    pub fn new(grid: TimeGrid, values: Vec<Metric>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(values.len(), grid.len()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, k: usize) -> &Metric {
        &self.values[k]
    }

    pub fn values(&self) -> &[Metric] {
        &self.values
    }

    /// The bare operators Θ(t_k) as a family, for differentiation.
    pub fn theta_family(&self) -> OperatorFamily {
        let ops: Vec<SquareOperator> = self.values.iter().map(|m| m.theta().clone()).collect();
        OperatorFamily::from_samples(self.grid.clone(), ops)
            .expect("metric samples match their grid")
    }
}

/// The reconstructed quadruple `(H, G, Σ, Θ)(t)` with its Dyson trajectory and
/// residual diagnostics; the common output of all three strategies.
#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub strategy: StrategyTag,
    pub gauge: GaugeTag,
    pub hamiltonian: OperatorFamily,
    pub generator: OperatorFamily,
    pub coriolis: OperatorFamily,
    pub metric: MetricFamily,
    pub dyson: DysonTrajectory,
    pub diagnostics: Vec<ResidualReport>,
}

impl ModelBundle {
    pub fn grid(&self) -> &TimeGrid {
        self.hamiltonian.grid()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn all_checks_passed(&self) -> bool {
        self.diagnostics.iter().all(|r| r.passed)
    }
}

/// Default tolerance for the samplewise quasi-Hermiticity of H.
pub const QUASI_HERMITICITY_TOL: f64 = 1e-9;
/// Default tolerance for the factorization residual Ω†Ω - Θ (relative).
pub const FACTORIZATION_TOL: f64 = 1e-9;
/// Default tolerance for the additive decomposition H - G - Σ.
pub const DECOMPOSITION_TOL: f64 = 1e-12;

/// Residual battery shared by the three strategies.
///
/// The two flow identities are checked with the second-order central stencil,
/// so their defaults scale with the square of the grid step; the remaining
/// identities are step-independent.
pub fn standard_diagnostics(
    hamiltonian: &OperatorFamily,
    generator: &OperatorFamily,
    coriolis: &OperatorFamily,
    metric: &MetricFamily,
    dyson: &DysonTrajectory,
) -> Result<Vec<ResidualReport>> {
    let samples = hamiltonian.len();
    let mut decomposition = 0.0f64;
    let mut quasi = 0.0f64;
    let mut factorization = 0.0f64;
    for k in 0..samples {
        let h = hamiltonian.value(k);
        let g = generator.value(k);
        let s = coriolis.value(k);
        let theta = metric.value(k);
        let omega = dyson.value(k);

        let residual = &(h - g) - s;
        decomposition = decomposition.max(relative(residual.frobenius_norm(), h.frobenius_norm()));
        quasi = quasi.max(quasi_hermiticity_defect(h, theta)?);
        let product = &omega.adjoint() * omega;
        factorization = factorization.max(
            (&product - theta.theta()).frobenius_norm() / theta.theta().frobenius_norm().max(1.0),
        );
    }

    let mut reports = vec![
        ResidualReport::new("decomposition H-G-Sigma", decomposition, DECOMPOSITION_TOL),
        ResidualReport::new("quasi-hermiticity of H", quasi, QUASI_HERMITICITY_TOL),
        ResidualReport::new("dyson factorization", factorization, FACTORIZATION_TOL),
    ];
    reports.extend(flow_identity_reports(coriolis, generator, metric)?);
    Ok(reports)
}

/// The two first-order flow identities of the metric, checked at interior
/// samples with central differences:
/// `i dΘ/dt = ΘΣ - Σ†Θ` and `i dΘ/dt = G†Θ - ΘG`.
pub fn flow_identity_reports(
    coriolis: &OperatorFamily,
    generator: &OperatorFamily,
    metric: &MetricFamily,
) -> Result<Vec<ResidualReport>> {
    let samples = metric.len();
    let theta_family = metric.theta_family();
    let h = metric.grid().step();
    let tolerance = (2.0 * h * h).max(1e-10);
    let i = num_complex::Complex64::new(0.0, 1.0);

    let mut coriolis_flow = 0.0f64;
    let mut generator_flow = 0.0f64;
    for k in 1..samples.saturating_sub(1) {
        let theta = metric.value(k).theta();
        let theta_dot = theta_family.time_derivative(k)?;
        let lhs = theta_dot.scale(i);

        let s = coriolis.value(k);
        let rhs_coriolis = &(theta * s) - &(&s.adjoint() * theta);
        coriolis_flow = coriolis_flow.max(relative(
            (&lhs - &rhs_coriolis).frobenius_norm(),
            rhs_coriolis.frobenius_norm(),
        ));

        let g = generator.value(k);
        let rhs_generator = &(&g.adjoint() * theta) - &(theta * g);
        generator_flow = generator_flow.max(relative(
            (&lhs - &rhs_generator).frobenius_norm(),
            rhs_generator.frobenius_norm(),
        ));
    }
    Ok(vec![
        ResidualReport::new("metric flow (coriolis)", coriolis_flow, tolerance),
        ResidualReport::new("metric flow (generator)", generator_flow, tolerance),
    ])
}
