//! Dynamical-input reconstruction: the observable Hamiltonian family `H(t)`
//! is given, everything else is derived from its instantaneous biorthogonal
//! eigensystems.
//!
//! Per sample, the metric is the weighted dyadic sum over double-kets with a
//! single constant weight vector; the Dyson map is fixed to the Hermitian
//! positive root of the metric, and the Coriolis operator follows by finite
//! differences of that root.

use num_complex::Complex64 as C64;

use crate::bundle::{
    standard_diagnostics, DysonTrajectory, GaugeTag, MetricFamily, ModelBundle, StrategyTag,
};
use crate::error::{Error, Result};
use crate::family::OperatorFamily;
use crate::metric::hermitian_sqrt;
use crate::operator::SquareOperator;
use crate::residual::ResidualReport;
use crate::spectral::{
    certify_spectrum, solve_biorthogonal, BiorthonormalSystem, SpectrumCertificate,
};

#[derive(Debug, Clone)]
pub struct StrategyOneOptions {
    /// Spectral tolerance: gap floor for the eigensolver and relative bound
    /// on |Im E| for the reality certificates.
    pub spectral_tol: f64,
    /// Upgrade the interior derivative of the Dyson root to fourth order by
    /// Richardson extrapolation of the central stencil.
    pub richardson: bool,
}

impl Default for StrategyOneOptions {
    fn default() -> Self {
        Self { spectral_tol: 1e-8, richardson: false }
    }
}

/// Certify the spectrum of every sample, stopping at the first sample that
/// fails to certify (solver failure or complex energies). Failure is data:
/// inspect the length and the last certificate.
pub fn spectrum_reality_scan(h: &OperatorFamily, tol: f64) -> Vec<SpectrumCertificate> {
    let mut certificates = Vec::with_capacity(h.len());
    for k in 0..h.len() {
        let Ok(system) = solve_biorthogonal(h.value(k), tol) else {
            break;
        };
        let cert = certify_spectrum(&system, tol);
        let stop = !cert.all_real;
        certificates.push(cert);
        if stop {
            break;
        }
    }
    certificates
}

/// True when the scan covered every sample with a real certificate.
pub fn scan_all_real(h: &OperatorFamily, certificates: &[SpectrumCertificate]) -> bool {
    certificates.len() == h.len() && certificates.iter().all(|c| c.all_real)
}

fn solve_chain(
    h: &OperatorFamily,
    tol: f64,
) -> Result<(Vec<BiorthonormalSystem>, Vec<SpectrumCertificate>)> {
    let mut systems: Vec<BiorthonormalSystem> = Vec::with_capacity(h.len());
    let mut certificates = Vec::with_capacity(h.len());
    for k in 0..h.len() {
        let t = h.grid().t(k);
        let mut system = solve_biorthogonal(h.value(k), tol).map_err(|e| match e {
            Error::DegenerateSpectrum { gap, .. } => Error::DegenerateSpectrumAt { t, gap },
            other => other,
        })?;
        let cert = certify_spectrum(&system, tol);
        if !cert.all_real {
            return Err(Error::ComplexSpectrumAt { t, max_imag: cert.max_imag });
        }
        if let Some(prev) = systems.last() {
            system.align_to(prev)?;
        }
        systems.push(system);
        certificates.push(cert);
    }
    Ok((systems, certificates))
}

/// Derivative of the Dyson-root family; optionally fourth-order at interior
/// samples via Richardson extrapolation of the central stencil.
fn root_derivative(omega: &OperatorFamily, k: usize, richardson: bool) -> Result<SquareOperator> {
    let m = omega.len();
    if richardson && k >= 2 && k + 2 < m {
        let h = omega.grid().step();
        let coarse = (omega.value(k + 2) - omega.value(k - 2)).scale(C64::new(0.25 / h, 0.0));
        let fine = (omega.value(k + 1) - omega.value(k - 1)).scale(C64::new(0.5 / h, 0.0));
        return Ok((&fine.scale(C64::new(4.0, 0.0)) - &coarse).scale(C64::new(1.0 / 3.0, 0.0)));
    }
    omega.time_derivative(k)
}

/// Reconstruct the full model from an observable Hamiltonian family with real
/// simple spectra and one constant positive weight vector.
pub fn run_strategy_one(
    h: &OperatorFamily,
    kappa: &[f64],
    options: &StrategyOneOptions,
) -> Result<ModelBundle> {
    if kappa.len() != h.dim() {
        return Err(Error::DimensionMismatch(kappa.len(), h.dim()));
    }
    if kappa.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::NonPositiveKappa);
    }
    let grid = h.grid().clone();
    let (systems, certificates) = solve_chain(h, options.spectral_tol)?;

    let mut metrics = Vec::with_capacity(systems.len());
    let mut roots = Vec::with_capacity(systems.len());
    for (k, system) in systems.iter().enumerate() {
        let metric = crate::spectral::build_metric(system, kappa).map_err(|e| match e {
            Error::NotPositiveDefinite { .. } | Error::NotHermitian { .. } => {
                Error::MetricSingularAt { t: grid.t(k) }
            }
            other => other,
        })?;
        roots.push(hermitian_sqrt(&metric)?);
        metrics.push(metric);
    }
    let metric = MetricFamily::new(grid.clone(), metrics)?;
    let dyson = DysonTrajectory::new(grid.clone(), roots)?;

    let omega_family = dyson.to_family();
    let mut sigma_values = Vec::with_capacity(omega_family.len());
    for k in 0..omega_family.len() {
        let omega_dot = root_derivative(&omega_family, k, options.richardson)?;
        let sigma = (&omega_family.value(k).invert()? * &omega_dot).scale(C64::new(0.0, 1.0));
        sigma_values.push(sigma);
    }
    let coriolis = OperatorFamily::from_samples(grid.clone(), sigma_values)?;
    let generator = h.zip_with(&coriolis, |hk, sk| hk - sk)?;

    let mut diagnostics = standard_diagnostics(h, &generator, &coriolis, &metric, &dyson)?;
    let worst_bio = systems
        .iter()
        .map(|s| s.biorthonormality_defect())
        .fold(0.0, f64::max);
    let worst_complete = systems.iter().map(|s| s.completeness_defect()).fold(0.0, f64::max);
    let worst_pairing = systems.iter().map(|s| s.pairing_residual()).fold(0.0, f64::max);
    let worst_imag = certificates
        .iter()
        .map(|c| c.max_imag / c.bounded_below_at.abs().max(1.0))
        .fold(0.0, f64::max);
    diagnostics.push(ResidualReport::new("biorthonormality", worst_bio, 1e-10));
    diagnostics.push(ResidualReport::new("bicompleteness", worst_complete, 1e-10));
    diagnostics.push(ResidualReport::new("eigenvalue pairing", worst_pairing, 1e-8));
    diagnostics.push(ResidualReport::new("spectral reality", worst_imag, options.spectral_tol));

    Ok(ModelBundle {
        strategy: StrategyTag::One,
        gauge: GaugeTag::HermitianRoot,
        hamiltonian: h.clone(),
        generator,
        coriolis,
        metric,
        dyson,
        diagnostics,
    })
}
