//! Numerical engine for unitary quantum dynamics generated by time-dependent
//! quasi-Hermitian operators.
//!
//! The evolution of a closed system can be split between a Schrödinger-type
//! generator `G(t)` acting on states and a Coriolis generator `Σ(t)` acting on
//! observables. Neither generator needs a real spectrum on its own; only their
//! superposition `H(t) = G(t) + Σ(t)` represents the instantaneous energy, and
//! it is kept self-adjoint with respect to a time-dependent metric
//! `Θ(t) = Ω†(t)Ω(t)` built from an invertible Dyson map `Ω(t)`.
//!
//! The crate reconstructs the full quadruple `(H, G, Σ, Θ)(t)` from any one of
//! the three admissible inputs:
//!
//! * [`strategy::one`] — from the observable Hamiltonian family `H(t)`,
//! * [`strategy::two`] — from the Coriolis family `Σ(t)` plus a Hermitian
//!   ansatz `A(t)`,
//! * [`strategy::three`] — from the state-evolution generator `G(t)` plus an
//!   initial biorthonormal basis,
//!
//! and cross-validates the results through residual diagnostics, spectral
//! certificates, and unitarity checks in the physical inner product.

pub mod acceptance;
pub mod bundle;
pub mod error;
pub mod evolution;
pub mod expm;
pub mod family;
pub mod fixtures;
pub mod grid;
pub mod ground_truth;
pub mod integrate;
pub mod metric;
pub mod operator;
pub mod report;
pub mod residual;
pub mod runner;
pub mod scenario;
pub mod spectral;
pub mod strategy;

pub use bundle::{DysonTrajectory, GaugeTag, MetricFamily, ModelBundle, StrategyTag};
pub use error::{Error, Result};
pub use family::{ClosedForm, OperatorFamily};
pub use grid::TimeGrid;
pub use metric::{assert_metric, hermitian_sqrt, Metric};
pub use operator::{hermiticity_defect, quasi_hermiticity_defect, SquareOperator};
pub use residual::ResidualReport;
pub use spectral::{
    build_metric, certify_spectrum, dyadic_projector, extract_kappa, solve_biorthogonal,
    BiorthonormalSystem, SpectrumCertificate,
};
