//! Built-in scenarios with closed-form reference solutions.
//!
//! `stationary-2x2`: a constant non-Hermitian two-level Hamiltonian
//! `[[0, 4], [1, 0]]` with real spectrum ±2; with weights (2, 2) the metric is
//! `diag(1, 4)`, the Dyson root `diag(1, 2)`, and the Coriolis operator
//! vanishes.
//!
//! `exp-metric-2x2`: the constant Coriolis generator `Σ = i diag(0, 1)` with
//! ansatz `[[0, 2], [2, 0]]` from `Ω(0) = I`; in closed form
//! `Ω(t) = diag(1, e^t)`, `Θ(t) = diag(1, e^{2t})`,
//! `H(t) = [[0, 2], [2e^{-2t}, 0]]`, energies `±2e^{-t}`.

use crate::family::ClosedForm;
use crate::operator::SquareOperator;
use crate::scenario::{FamilySource, InputKind, Scenario, ScenarioInput, ToleranceOverrides};

fn stationary_h() -> SquareOperator {
    SquareOperator::from_real_rows(&[vec![0.0, 4.0], vec![1.0, 0.0]]).unwrap()
}

fn symmetric_coupling() -> SquareOperator {
    SquareOperator::from_real_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap()
}

fn coriolis_generator() -> SquareOperator {
    SquareOperator::from_rows(&[
        vec![num_complex::Complex64::new(0.0, 0.0), num_complex::Complex64::new(0.0, 0.0)],
        vec![num_complex::Complex64::new(0.0, 0.0), num_complex::Complex64::new(0.0, 1.0)],
    ])
    .unwrap()
}

/// The exponentially decaying Hamiltonian family of `exp-metric-2x2`,
/// `H(t) = [[0, 2], [2 e^{-2t}, 0]]`, as a closed form.
pub fn exponential_hamiltonian_form() -> ClosedForm {
    ClosedForm::EntrywiseExp {
        amplitude: symmetric_coupling(),
        rate: SquareOperator::from_real_rows(&[vec![0.0, 0.0], vec![-2.0, 0.0]]).unwrap(),
    }
}

/// Constant two-level scenario solved through strategy one.
pub fn stationary_2x2() -> Scenario {
    Scenario {
        name: "stationary-2x2".into(),
        dim: 2,
        grid: crate::grid::TimeGrid::new(0.0, 1.0, 101).unwrap(),
        input: ScenarioInput::Hamiltonian {
            family: FamilySource::Form(ClosedForm::Constant(stationary_h())),
        },
        kappa: Some(vec![2.0, 2.0]),
        observables: vec![(
            "energy".into(),
            FamilySource::Form(ClosedForm::Constant(stationary_h())),
        )],
        steps_per_sample: 1,
        seed: 0,
        tolerances: ToleranceOverrides::default(),
    }
}

/// Exponential-metric scenario solved through strategy two.
pub fn exp_metric_2x2() -> Scenario {
    Scenario {
        name: "exp-metric-2x2".into(),
        dim: 2,
        grid: crate::grid::TimeGrid::new(0.0, 1.0, 1001).unwrap(),
        input: ScenarioInput::Coriolis {
            coriolis: FamilySource::Form(ClosedForm::Constant(coriolis_generator())),
            ansatz: FamilySource::Form(ClosedForm::Constant(symmetric_coupling())),
            omega0: None,
            symmetrize_ansatz: false,
        },
        kappa: None,
        observables: vec![(
            "energy".into(),
            FamilySource::Form(exponential_hamiltonian_form()),
        )],
        steps_per_sample: 1,
        seed: 0,
        tolerances: ToleranceOverrides::default(),
    }
}

/// The exponential-metric dynamics expressed as a strategy-three input:
/// `G(t) = H(t) - Σ` with the initial basis read from `H(0)`.
pub fn exp_metric_2x2_generator() -> Scenario {
    let minus_sigma = SquareOperator::from_rows(&[
        vec![num_complex::Complex64::new(0.0, 0.0), num_complex::Complex64::new(0.0, 0.0)],
        vec![num_complex::Complex64::new(0.0, 0.0), num_complex::Complex64::new(0.0, -1.0)],
    ])
    .unwrap();
    Scenario {
        name: "exp-metric-2x2-generator".into(),
        dim: 2,
        grid: crate::grid::TimeGrid::new(0.0, 1.0, 1001).unwrap(),
        input: ScenarioInput::Generator {
            generator: FamilySource::Form(ClosedForm::Sum(vec![
                exponential_hamiltonian_form(),
                ClosedForm::Constant(minus_sigma),
            ])),
            initial_basis: crate::scenario::InitialBasis::FromHamiltonian(symmetric_coupling()),
        },
        kappa: Some(vec![2.0, 2.0]),
        observables: vec![(
            "energy".into(),
            FamilySource::Form(exponential_hamiltonian_form()),
        )],
        steps_per_sample: 1,
        seed: 0,
        tolerances: ToleranceOverrides::default(),
    }
}

/// Names and one-line descriptions of every built-in scenario.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "stationary-2x2",
            "constant [[0,4],[1,0]] via strategy one; metric diag(1,4), coriolis 0",
        ),
        (
            "exp-metric-2x2",
            "constant coriolis i*diag(0,1) via strategy two; metric diag(1,e^{2t})",
        ),
        (
            "exp-metric-2x2-generator",
            "same dynamics as exp-metric-2x2, reconstructed from G via strategy three",
        ),
    ]
}

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "stationary-2x2" => Some(stationary_2x2()),
        "exp-metric-2x2" => Some(exp_metric_2x2()),
        "exp-metric-2x2-generator" => Some(exp_metric_2x2_generator()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_consistent() {
        for (name, _) in list() {
            let scenario = by_name(name).unwrap();
            assert_eq!(scenario.name, name);
            assert_eq!(scenario.dim, 2);
        }
        assert!(by_name("missing").is_none());
    }

    #[test]
    fn fixture_kinds() {
        assert_eq!(stationary_2x2().kind(), InputKind::One);
        assert_eq!(exp_metric_2x2().kind(), InputKind::Two);
        assert_eq!(exp_metric_2x2_generator().kind(), InputKind::Three);
    }
}
