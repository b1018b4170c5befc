//! Time-parametrized operator families.
//!
//! A family holds one operator per grid sample. When the samples were
//! generated by an analytic rule the rule travels with the family, so
//! integrators can evaluate the operator exactly between samples; otherwise
//! evaluation falls back to linear interpolation.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::expm::{expm, expm_with_derivative};
use crate::grid::TimeGrid;
use crate::operator::SquareOperator;

/// Which derived operator a [`GaugeForm`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugePart {
    /// The Hermitian textbook Hamiltonian h(t).
    Textbook,
    /// The Dyson map Ω(t) = exp(W(t)).
    Dyson,
    /// The time derivative of the Dyson map.
    DysonDot,
    /// The metric Θ(t) = Ω†(t)Ω(t).
    Metric,
    /// H(t) = Ω⁻¹(t) h(t) Ω(t).
    Hamiltonian,
    /// Σ(t) = i Ω⁻¹(t) Ω̇(t).
    Coriolis,
    /// G(t) = H(t) - Σ(t).
    Generator,
    /// A(t) = Θ(t) H(t) = Ω†(t) h(t) Ω(t), Hermitian by construction.
    Ansatz,
}

impl GaugePart {
    fn tag(&self) -> &'static str {
        match self {
            GaugePart::Textbook => "gauge:textbook",
            GaugePart::Dyson => "gauge:dyson",
            GaugePart::DysonDot => "gauge:dyson-dot",
            GaugePart::Metric => "gauge:metric",
            GaugePart::Hamiltonian => "gauge:hamiltonian",
            GaugePart::Coriolis => "gauge:coriolis",
            GaugePart::Generator => "gauge:generator",
            GaugePart::Ansatz => "gauge:ansatz",
        }
    }
}

/// Analytic rule: a Hermitian polynomial family h(t) seen through the gauge
/// Ω(t) = exp(W(t)) with polynomial W(t). All derived operators of the model
/// are then available in closed form, including exact time derivatives.
#[derive(Debug, Clone)]
pub struct GaugeForm {
    pub textbook_coeffs: Vec<SquareOperator>,
    pub gauge_coeffs: Vec<SquareOperator>,
    pub part: GaugePart,
}

fn poly_eval(coeffs: &[SquareOperator], t: f64) -> SquareOperator {
    let dim = coeffs[0].dim();
    let mut acc = SquareOperator::zeros(dim);
    let mut power = 1.0;
    for c in coeffs {
        acc = &acc + &c.scale(C64::new(power, 0.0));
        power *= t;
    }
    acc
}

fn poly_derivative_eval(coeffs: &[SquareOperator], t: f64) -> SquareOperator {
    let dim = coeffs[0].dim();
    let mut acc = SquareOperator::zeros(dim);
    let mut power = 1.0;
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        acc = &acc + &c.scale(C64::new(k as f64 * power, 0.0));
        power *= t;
    }
    acc
}

impl GaugeForm {
    fn eval(&self, t: f64) -> Result<SquareOperator> {
        let w = poly_eval(&self.gauge_coeffs, t);
        match self.part {
            GaugePart::Textbook => Ok(poly_eval(&self.textbook_coeffs, t)),
            GaugePart::Dyson => expm(&w),
            GaugePart::DysonDot => {
                let wdot = poly_derivative_eval(&self.gauge_coeffs, t);
                let (_, deriv) = expm_with_derivative(&w, &wdot)?;
                Ok(deriv)
            }
            GaugePart::Metric => {
                let omega = expm(&w)?;
                Ok(&omega.adjoint() * &omega)
            }
            GaugePart::Hamiltonian => {
                let omega = expm(&w)?;
                let h = poly_eval(&self.textbook_coeffs, t);
                Ok(&omega.invert()? * &(&h * &omega))
            }
            GaugePart::Coriolis => {
                let wdot = poly_derivative_eval(&self.gauge_coeffs, t);
                let (omega, omega_dot) = expm_with_derivative(&w, &wdot)?;
                Ok((&omega.invert()? * &omega_dot).scale(C64::new(0.0, 1.0)))
            }
            GaugePart::Generator => {
                let wdot = poly_derivative_eval(&self.gauge_coeffs, t);
                let (omega, omega_dot) = expm_with_derivative(&w, &wdot)?;
                let inv = omega.invert()?;
                let h = poly_eval(&self.textbook_coeffs, t);
                let hamiltonian = &inv * &(&h * &omega);
                let coriolis = (&inv * &omega_dot).scale(C64::new(0.0, 1.0));
                Ok(&hamiltonian - &coriolis)
            }
            GaugePart::Ansatz => {
                let omega = expm(&w)?;
                let h = poly_eval(&self.textbook_coeffs, t);
                Ok(&omega.adjoint() * &(&h * &omega))
            }
        }
    }
}

/// An analytic generating rule for an operator family.
#[derive(Debug, Clone)]
pub enum ClosedForm {
    /// F(t) = M.
    Constant(SquareOperator),
    /// F(t) = Σ_k M_k t^k.
    Polynomial(Vec<SquareOperator>),
    /// F_ij(t) = A_ij exp(B_ij t), entrywise.
    EntrywiseExp { amplitude: SquareOperator, rate: SquareOperator },
    /// F(t) = P exp(t K).
    ExpGenerator { prefactor: SquareOperator, generator: SquareOperator },
    /// Pointwise sum of closed forms.
    Sum(Vec<ClosedForm>),
    /// Operator derived from a Hermitian family and an exponential gauge.
    Gauge(GaugeForm),
}

impl ClosedForm {
    pub fn eval(&self, t: f64) -> Result<SquareOperator> {
        match self {
            ClosedForm::Constant(m) => Ok(m.clone()),
            ClosedForm::Polynomial(coeffs) => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidScenario(
                        "polynomial family needs at least one coefficient".into(),
                    ));
                }
                Ok(poly_eval(coeffs, t))
            }
            ClosedForm::EntrywiseExp { amplitude, rate } => {
                amplitude.check_dim(rate)?;
                let mut mat = amplitude.mat().clone();
                for ((i, j), v) in mat.indexed_iter_mut() {
                    let r = rate.mat()[(i, j)];
                    *v *= (r * C64::new(t, 0.0)).exp();
                }
                SquareOperator::new(mat)
            }
            ClosedForm::ExpGenerator { prefactor, generator } => {
                prefactor.check_dim(generator)?;
                let e = expm(&generator.scale(C64::new(t, 0.0)))?;
                Ok(prefactor * &e)
            }
            ClosedForm::Sum(terms) => {
                let first = terms
                    .first()
                    .ok_or_else(|| Error::InvalidScenario("empty sum family".into()))?;
                let mut acc = first.eval(t)?;
                for term in &terms[1..] {
                    let v = term.eval(t)?;
                    acc.check_dim(&v)?;
                    acc = &acc + &v;
                }
                Ok(acc)
            }
            ClosedForm::Gauge(g) => g.eval(t),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            ClosedForm::Constant(_) => "constant".into(),
            ClosedForm::Polynomial(c) => format!("polynomial[{}]", c.len().saturating_sub(1)),
            ClosedForm::EntrywiseExp { .. } => "entrywise-exp".into(),
            ClosedForm::ExpGenerator { .. } => "exp-generator".into(),
            ClosedForm::Sum(terms) => {
                let inner: Vec<String> = terms.iter().map(|x| x.tag()).collect();
                format!("sum({})", inner.join(","))
            }
            ClosedForm::Gauge(g) => g.part.tag().into(),
        }
    }
}

/// One operator per sample of a uniform time grid, with optional analytic
/// provenance.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    grid: TimeGrid,
    values: Vec<SquareOperator>,
    closed_form: Option<ClosedForm>,
}

impl OperatorFamily {
    pub fn from_samples(grid: TimeGrid, values: Vec<SquareOperator>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(values.len(), grid.len()));
        }
        let dim = values[0].dim();
        if values.iter().any(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, 0));
        }
        Ok(Self { grid, values, closed_form: None })
    }

    /// Sample an analytic rule over the grid, keeping the rule for exact
    /// evaluation between samples.
    pub fn from_closed_form(grid: TimeGrid, form: ClosedForm) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            values.push(form.eval(grid.t(k))?);
        }
        let dim = values[0].dim();
        if values.iter().any(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, 0));
        }
        Ok(Self { grid, values, closed_form: Some(form) })
    }

    pub fn constant(grid: TimeGrid, value: SquareOperator) -> Self {
        let values = vec![value.clone(); grid.len()];
        Self { grid, values, closed_form: Some(ClosedForm::Constant(value)) }
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

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    pub fn closed_form_tag(&self) -> Option<String> {
        self.closed_form.as_ref().map(|f| f.tag())
    }

    /// Evaluate at an arbitrary time: exactly via the closed form when
    /// available, by linear interpolation between samples otherwise.
    pub fn eval(&self, t: f64) -> Result<SquareOperator> {
        if let Some(form) = &self.closed_form {
            return form.eval(t);
        }
        let k = self.grid.bracket(t);
        let t0 = self.grid.t(k);
        let lambda = ((t - t0) / self.grid.step()).clamp(0.0, 1.0);
        let left = &self.values[k];
        let right = &self.values[k + 1];
        Ok(&left.scale(C64::new(1.0 - lambda, 0.0)) + &right.scale(C64::new(lambda, 0.0)))
    }

    /// Second-order finite difference at sample `k`: central at interior
    /// samples, one-sided three-point at the ends.
    pub fn time_derivative(&self, k: usize) -> Result<SquareOperator> {
        let m = self.len();
        if m < 3 {
            return Err(Error::GridTooShort { got: m, need: 3 });
        }
        if k >= m {
            return Err(Error::IndexOutOfRange { index: k, dim: m });
        }
        let h = self.grid.step();
        let inv2h = C64::new(0.5 / h, 0.0);
        let op = if k == 0 {
            let a = self.value(0).scale(C64::new(-3.0, 0.0));
            let b = self.value(1).scale(C64::new(4.0, 0.0));
            let c = self.value(2);
            (&(&a + &b) - c).scale(inv2h)
        } else if k == m - 1 {
            let a = self.value(m - 1).scale(C64::new(3.0, 0.0));
            let b = self.value(m - 2).scale(C64::new(4.0, 0.0));
            let c = self.value(m - 3);
            (&(&a - &b) + c).scale(inv2h)
        } else {
            (self.value(k + 1) - self.value(k - 1)).scale(inv2h)
        };
        Ok(op)
    }

    /// Entire derivative family by finite differences.
    pub fn derivative_family(&self) -> Result<OperatorFamily> {
        let values: Result<Vec<_>> = (0..self.len()).map(|k| self.time_derivative(k)).collect();
        OperatorFamily::from_samples(self.grid.clone(), values?)
    }

    /// Combine two families sample by sample.
    pub fn zip_with<F>(&self, other: &OperatorFamily, f: F) -> Result<OperatorFamily>
    where
        F: Fn(&SquareOperator, &SquareOperator) -> SquareOperator,
    {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::InvalidGrid);
        }
        let values: Vec<_> = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| f(a, b))
            .collect();
        OperatorFamily::from_samples(self.grid.clone(), values)
    }
}
