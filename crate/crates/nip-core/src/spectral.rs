//! Biorthogonal eigensystems of quasi-Hermitian operators.
//!
//! A non-Hermitian operator with a simple spectrum carries two families of
//! eigenvectors: right eigenvectors of `H` (kets) and right eigenvectors of
//! `H†` (double-kets). After pairing and rescaling, the two families satisfy
//! `<<psi_n|psi_m> = delta_nm` and resolve the identity, which is what every
//! metric construction in this crate rests on.

use ndarray::{Array1, Array2};
use ndarray_linalg::Eig;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::metric::{assert_metric, Metric, DEFAULT_METRIC_EPS};
use crate::operator::SquareOperator;

/// Paired eigenvalues, kets, and double-kets of a diagonalizable operator,
/// normalized so every cross product `<<psi_n|psi_m>` is exactly `delta_nm` on
/// the diagonal.
///
/// Convention: the largest-modulus component of each ket equals one (real,
/// positive); the leftover scale and phase sit entirely in the double-ket.
#[derive(Debug, Clone)]
pub struct BiorthonormalSystem {
    energies: Vec<C64>,
    kets: Vec<Array1<C64>>,
    double_kets: Vec<Array1<C64>>,
    pairing_residual: f64,
}

fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn canonical_ket(v: &Array1<C64>) -> Array1<C64> {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best {
            best = m;
            idx = i;
        }
    }
    let pivot = v[idx];
    v.mapv(|z| z / pivot)
}

impl BiorthonormalSystem {
    /// Assemble from explicit vectors, validating the cross products.
    pub fn from_parts(
        energies: Vec<C64>,
        kets: Vec<Array1<C64>>,
        double_kets: Vec<Array1<C64>>,
        tol: f64,
    ) -> Result<Self> {
        let n = energies.len();
        if kets.len() != n || double_kets.len() != n || n == 0 {
            return Err(Error::DimensionMismatch(kets.len(), n));
        }
        if kets.iter().chain(double_kets.iter()).any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(kets[0].len(), n));
        }
        let system = Self { energies, kets, double_kets, pairing_residual: 0.0 };
        let defect = system.biorthonormality_defect();
        if defect > tol {
            return Err(Error::InitialBasisInvalid(defect));
        }
        Ok(system)
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[C64] {
        &self.energies
    }

    pub fn ket(&self, n: usize) -> &Array1<C64> {
        &self.kets[n]
    }

    pub fn double_ket(&self, n: usize) -> &Array1<C64> {
        &self.double_kets[n]
    }

    pub fn kets(&self) -> &[Array1<C64>] {
        &self.kets
    }

    pub fn double_kets(&self) -> &[Array1<C64>] {
        &self.double_kets
    }

    /// Largest residual of the eigenvalue pairing between the two solves.
    pub fn pairing_residual(&self) -> f64 {
        self.pairing_residual
    }

    /// Kets as matrix columns.
    pub fn kets_matrix(&self) -> Array2<C64> {
        let n = self.dim();
        let mut m = Array2::zeros((n, n));
        for (j, v) in self.kets.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = v[i];
            }
        }
        m
    }

    /// Double-kets as matrix columns.
    pub fn double_kets_matrix(&self) -> Array2<C64> {
        let n = self.dim();
        let mut m = Array2::zeros((n, n));
        for (j, v) in self.double_kets.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = v[i];
            }
        }
        m
    }

    /// `max |<<psi_m|psi_n> - delta_mn|`.
    pub fn biorthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for m in 0..n {
            for k in 0..n {
                let overlap = inner(&self.double_kets[m], &self.kets[k]);
                let target = if m == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((overlap - target).norm());
            }
        }
        worst
    }

    /// `|sum_n |psi_n><<psi_n| - I|_F`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.dim();
        let mut acc = Array2::<C64>::zeros((n, n));
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    acc[(i, j)] += self.kets[m][i] * self.double_kets[m][j].conj();
                }
            }
        }
        let eye: Array2<C64> = Array2::eye(n);
        (&acc - &eye).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral reassembly `sum_n E_n |psi_n><<psi_n|`.
    pub fn reconstruct(&self) -> SquareOperator {
        let n = self.dim();
        let mut acc = Array2::<C64>::zeros((n, n));
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    acc[(i, j)] += self.energies[m] * self.kets[m][i] * self.double_kets[m][j].conj();
                }
            }
        }
        SquareOperator::new(acc).expect("reassembled operator is square and finite")
    }

    /// Reorder and re-phase the eigenpairs to follow `previous` along a grid:
    /// pairs are matched by largest ket overlap and each matched ket is
    /// rotated so its overlap with the previous ket is real positive. Pure
    /// phases leave every metric built from the system unchanged.
    pub fn align_to(&mut self, previous: &BiorthonormalSystem) -> Result<()> {
        let n = self.dim();
        if previous.dim() != n {
            return Err(Error::DimensionMismatch(previous.dim(), n));
        }
        let mut taken = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for prev in &previous.kets {
            let mut best = None;
            let mut best_score = -1.0;
            for (j, cand) in self.kets.iter().enumerate() {
                if taken[j] {
                    continue;
                }
                let score = inner(prev, cand).norm() / (norm(prev) * norm(cand)).max(1e-300);
                if score > best_score {
                    best_score = score;
                    best = Some(j);
                }
            }
            let j = best.expect("one unmatched eigenpair per previous pair");
            taken[j] = true;
            order.push(j);
        }
        let mut energies = Vec::with_capacity(n);
        let mut kets = Vec::with_capacity(n);
        let mut double_kets = Vec::with_capacity(n);
        for (slot, &j) in order.iter().enumerate() {
            let overlap = inner(&previous.kets[slot], &self.kets[j]);
            let phase = if overlap.norm() > 0.0 {
                overlap.conj() / overlap.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            energies.push(self.energies[j]);
            kets.push(self.kets[j].mapv(|z| z * phase));
            double_kets.push(self.double_kets[j].mapv(|z| z * phase));
        }
        self.energies = energies;
        self.kets = kets;
        self.double_kets = double_kets;
        Ok(())
    }
}

/// Reality and separation certificate for a computed spectrum.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SpectrumCertificate {
    pub all_real: bool,
    pub max_imag: f64,
    pub min_gap: f64,
    pub bounded_below_at: f64,
}

/// Solve the paired eigenproblems `H psi = E psi` and `H† psi' = E* psi'`,
/// match the two solves by eigenvalue proximity (ties broken by eigenvector
/// overlap), and rescale to the biorthonormal convention.
///
/// Requires a simple spectrum: the smallest eigenvalue gap must exceed `tol`.
pub fn solve_biorthogonal(h: &SquareOperator, tol: f64) -> Result<BiorthonormalSystem> {
    let n = h.dim();
    let (evals, evecs) = h.mat().eig()?;
    let (advals, advecs) = h.adjoint().mat().eig()?;

    // ascending by real part, then imaginary part
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (evals[a].re, evals[a].im)
            .partial_cmp(&(evals[b].re, evals[b].im))
            .expect("finite eigenvalues")
    });

    let energies: Vec<C64> = order.iter().map(|&i| evals[i]).collect();
    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            min_gap = min_gap.min((energies[i] - energies[j]).norm());
        }
    }
    if n > 1 && min_gap <= tol {
        return Err(Error::DegenerateSpectrum { gap: min_gap, tolerance: tol });
    }

    let mut kets = Vec::with_capacity(n);
    for &i in &order {
        kets.push(canonical_ket(&evecs.column(i).to_owned()));
    }

    // pair each ket eigenvalue E with the adjoint eigenvalue closest to E*;
    // near-ties are resolved by the largest eigenvector overlap
    let mut taken = vec![false; n];
    let mut double_kets = Vec::with_capacity(n);
    let mut pairing_residual = 0.0f64;
    for (slot, e) in energies.iter().enumerate() {
        let target = e.conj();
        let mut best_dist = f64::INFINITY;
        for j in 0..n {
            if !taken[j] {
                best_dist = best_dist.min((advals[j] - target).norm());
            }
        }
        let mut pick = None;
        let mut pick_overlap = -1.0;
        for j in 0..n {
            if taken[j] {
                continue;
            }
            let dist = (advals[j] - target).norm();
            if dist <= best_dist + tol {
                let w = advecs.column(j).to_owned();
                let overlap = inner(&w, &kets[slot]).norm() / norm(&w).max(1e-300);
                if overlap > pick_overlap {
                    pick_overlap = overlap;
                    pick = Some((j, dist));
                }
            }
        }
        let (j, dist) = pick.expect("adjoint eigenpair available for every ket");
        taken[j] = true;
        pairing_residual = pairing_residual.max(dist);

        let w = advecs.column(j).to_owned();
        let cross = inner(&w, &kets[slot]);
        let cosine = cross.norm() / (norm(&w) * norm(&kets[slot])).max(1e-300);
        if cosine <= tol {
            return Err(Error::NonDiagonalizable { overlap: cosine });
        }
        double_kets.push(w.mapv(|z| z / cross.conj()));
    }

    let system = BiorthonormalSystem { energies, kets, double_kets, pairing_residual };
    let defect = system.biorthonormality_defect();
    if defect > 1e-6 {
        return Err(Error::NonDiagonalizable { overlap: defect });
    }
    Ok(system)
}

/// Summarize reality, separation, and lower bound of the spectrum.
///
/// Reality is judged relative to the eigenvalue scale:
/// `max |Im E| <= tol * max(1, max |E|)`.
pub fn certify_spectrum(system: &BiorthonormalSystem, tol: f64) -> SpectrumCertificate {
    let energies = system.energies();
    let max_imag = energies.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
    let max_abs = energies.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let mut min_gap = f64::INFINITY;
    for i in 0..energies.len() {
        for j in i + 1..energies.len() {
            min_gap = min_gap.min((energies[i] - energies[j]).norm());
        }
    }
    let bounded_below_at = energies.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
    SpectrumCertificate {
        all_real: max_imag <= tol * max_abs.max(1.0),
        max_imag,
        min_gap,
        bounded_below_at,
    }
}

/// The elementary dyadic projector `pi_n = |psi_n><<psi_n|`; idempotent with
/// unit trace under the biorthonormal convention.
pub fn dyadic_projector(system: &BiorthonormalSystem, n: usize) -> Result<SquareOperator> {
    if n >= system.dim() {
        return Err(Error::IndexOutOfRange { index: n, dim: system.dim() });
    }
    let dim = system.dim();
    let ket = system.ket(n);
    let dk = system.double_ket(n);
    let mut mat = Array2::<C64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            mat[(i, j)] = ket[i] * dk[j].conj();
        }
    }
    SquareOperator::new(mat)
}

/// Assemble the metric `Θ = sum_n |psi_n>> kappa_n <<psi_n|` from positive
/// weights; every such Θ renders the source operator quasi-Hermitian.
pub fn build_metric(system: &BiorthonormalSystem, kappa: &[f64]) -> Result<Metric> {
    let n = system.dim();
    if kappa.len() != n {
        return Err(Error::DimensionMismatch(kappa.len(), n));
    }
    if kappa.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
        return Err(Error::NonPositiveKappa);
    }
    let mut mat = Array2::<C64>::zeros((n, n));
    for (m, weight) in kappa.iter().enumerate() {
        let dk = system.double_ket(m);
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] += dk[i] * dk[j].conj() * C64::new(*weight, 0.0);
            }
        }
    }
    let theta = SquareOperator::new(mat)?;
    Ok(assert_metric(&theta, DEFAULT_METRIC_EPS)?.with_kappa(kappa.to_vec()))
}

/// Read the weights back out of a compatible metric: `kappa_n =
/// <psi_n|Θ|psi_n>`. Off-diagonal weight beyond tolerance means Θ does not
/// belong to the system's metric family.
pub fn extract_kappa(system: &BiorthonormalSystem, theta: &Metric) -> Result<Vec<f64>> {
    let n = system.dim();
    if theta.dim() != n {
        return Err(Error::DimensionMismatch(theta.dim(), n));
    }
    let mut weights = Vec::with_capacity(n);
    let mut diag_scale = 1.0f64;
    let mut off_max = 0.0f64;
    let mut gram = vec![vec![C64::new(0.0, 0.0); n]; n];
    for m in 0..n {
        let theta_ket = theta.apply(system.ket(m));
        for k in 0..n {
            gram[k][m] = inner(system.ket(k), &theta_ket);
        }
    }
    for (m, row) in gram.iter().enumerate() {
        diag_scale = diag_scale.max(row[m].norm());
    }
    for (k, row) in gram.iter().enumerate() {
        for (m, value) in row.iter().enumerate() {
            if k != m {
                off_max = off_max.max(value.norm());
            }
        }
    }
    if off_max > 1e-8 * diag_scale {
        return Err(Error::IncompatibleMetric(off_max));
    }
    for m in 0..n {
        let d = gram[m][m];
        if d.re <= 0.0 || d.im.abs() > 1e-8 * d.re.abs().max(1.0) {
            return Err(Error::IncompatibleMetric(d.norm()));
        }
        weights.push(d.re);
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn stationary_h() -> SquareOperator {
        SquareOperator::from_real_rows(&[vec![0.0, 4.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn solves_the_stationary_two_level_system() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        assert!((sys.energies()[0] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((sys.energies()[1] - c(2.0, 0.0)).norm() < 1e-12);
        // kets normalized so the largest component is exactly one
        let kp = sys.ket(1);
        assert!((kp[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((kp[1] - c(0.5, 0.0)).norm() < 1e-12);
        let km = sys.ket(0);
        assert!((km[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((km[1] - c(-0.5, 0.0)).norm() < 1e-12);
        // double-kets carry the scale that makes cross products exact
        let dp = sys.double_ket(1);
        assert!((dp[0] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((dp[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(sys.biorthonormality_defect() < 1e-12);
        assert!(sys.completeness_defect() < 1e-12);
        // hand check: the two raw eigenvector families are mutually orthogonal
        let cross = inner(&sys.double_ket(0), &sys.ket(1));
        assert!(cross.norm() < 1e-12);
    }

    #[test]
    fn hermitian_input_gives_coinciding_families() {
        let h = SquareOperator::from_real_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let sys = solve_biorthogonal(&h, 1e-8).unwrap();
        for nidx in 0..2 {
            let k = sys.ket(nidx);
            let d = sys.double_ket(nidx);
            // same direction; scales fixed by the two conventions
            let overlap = inner(k, d).norm() / (norm(k) * norm(d));
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_input_gives_standard_basis() {
        let h = SquareOperator::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let sys = solve_biorthogonal(&h, 1e-8).unwrap();
        for (n, e) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert!((sys.energies()[n] - c(*e, 0.0)).norm() < 1e-13);
            for i in 0..3 {
                let expect = if i == n { 1.0 } else { 0.0 };
                assert!((sys.ket(n)[i] - c(expect, 0.0)).norm() < 1e-12);
                assert!((sys.double_ket(n)[i] - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_degenerate_spectrum() {
        let h = SquareOperator::identity(2);
        assert!(matches!(
            solve_biorthogonal(&h, 1e-8),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn rejects_defective_operator() {
        // Jordan block: eigenvalues split by roundoff only, or defective
        let h = SquareOperator::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(solve_biorthogonal(&h, 1e-8).is_err());
    }

    #[test]
    fn certificate_on_real_spectrum() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        let cert = certify_spectrum(&sys, 1e-10);
        assert!(cert.all_real);
        assert!((cert.min_gap - 4.0).abs() < 1e-10);
        assert!((cert.bounded_below_at + 2.0).abs() < 1e-10);
    }

    #[test]
    fn certificate_flags_imaginary_pair() {
        // rotation generator: eigenvalues +-i
        let h = SquareOperator::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let sys = solve_biorthogonal(&h, 1e-8).unwrap();
        let cert = certify_spectrum(&sys, 1e-10);
        assert!(!cert.all_real);
        assert!((cert.max_imag - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certificate_single_level() {
        let sys = BiorthonormalSystem::from_parts(
            vec![c(0.0, 0.0)],
            vec![Array1::from_vec(vec![c(1.0, 0.0)])],
            vec![Array1::from_vec(vec![c(1.0, 0.0)])],
            1e-10,
        )
        .unwrap();
        let cert = certify_spectrum(&sys, 1e-10);
        assert!(cert.all_real);
    }

    #[test]
    fn projector_matches_hand_value() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        // eigenpair with E = +2: |[1, .5]><[.5, 1]|
        let p = dyadic_projector(&sys, 1).unwrap();
        let expected = SquareOperator::from_real_rows(&[vec![0.5, 1.0], vec![0.25, 0.5]]).unwrap();
        assert!((&p - &expected).frobenius_norm() < 1e-12);
        assert!((p.trace() - c(1.0, 0.0)).norm() < 1e-12);
        // idempotent
        assert!((&(&p * &p) - &p).frobenius_norm() < 1e-12);
    }

    #[test]
    fn projectors_resolve_identity() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        let sum = &dyadic_projector(&sys, 0).unwrap() + &dyadic_projector(&sys, 1).unwrap();
        assert!((&sum - &SquareOperator::identity(2)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn metric_from_weights_matches_hand_values() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        let theta = build_metric(&sys, &[2.0, 2.0]).unwrap();
        let expected = SquareOperator::diagonal(&[c(1.0, 0.0), c(4.0, 0.0)]);
        assert!((theta.theta() - &expected).frobenius_norm() < 1e-12);

        let theta_half = build_metric(&sys, &[1.0, 1.0]).unwrap();
        let expected_half = SquareOperator::diagonal(&[c(0.5, 0.0), c(2.0, 0.0)]);
        assert!((theta_half.theta() - &expected_half).frobenius_norm() < 1e-12);
    }

    #[test]
    fn metric_renders_source_quasi_hermitian() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        let theta = build_metric(&sys, &[2.0, 2.0]).unwrap();
        let defect = crate::operator::quasi_hermiticity_defect(&stationary_h(), &theta).unwrap();
        assert!(defect < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        assert!(matches!(build_metric(&sys, &[1.0, 0.0]), Err(Error::NonPositiveKappa)));
        assert!(matches!(build_metric(&sys, &[1.0, -2.0]), Err(Error::NonPositiveKappa)));
    }

    #[test]
    fn kappa_extraction_inverts_construction() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        let theta = assert_metric(&SquareOperator::diagonal(&[c(1.0, 0.0), c(4.0, 0.0)]), 1e-10)
            .unwrap();
        let kappa = extract_kappa(&sys, &theta).unwrap();
        assert!((kappa[0] - 2.0).abs() < 1e-12);
        assert!((kappa[1] - 2.0).abs() < 1e-12);

        let theta_half =
            assert_metric(&SquareOperator::diagonal(&[c(0.5, 0.0), c(2.0, 0.0)]), 1e-10).unwrap();
        let kappa_half = extract_kappa(&sys, &theta_half).unwrap();
        assert!((kappa_half[0] - 1.0).abs() < 1e-12);
        assert!((kappa_half[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incompatible_metric_is_rejected() {
        let sys = solve_biorthogonal(&stationary_h(), 1e-8).unwrap();
        // a perfectly fine metric that is not in this system's family
        let theta = assert_metric(
            &SquareOperator::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap(),
            1e-10,
        )
        .unwrap();
        assert!(matches!(extract_kappa(&sys, &theta), Err(Error::IncompatibleMetric(_))));
    }

    #[test]
    fn spectral_reassembly_returns_the_operator() {
        let h = stationary_h();
        let sys = solve_biorthogonal(&h, 1e-8).unwrap();
        assert!((&sys.reconstruct() - &h).frobenius_norm() < 1e-12);
    }

    #[test]
    fn alignment_permutes_and_rephases() {
        let h = stationary_h();
        let sys = solve_biorthogonal(&h, 1e-8).unwrap();
        let mut shuffled = sys.clone();
        shuffled.energies.reverse();
        shuffled.kets.reverse();
        shuffled.double_kets.reverse();
        let phase = c(0.0, 1.0);
        shuffled.kets[0] = shuffled.kets[0].mapv(|z| z * phase);
        shuffled.double_kets[0] = shuffled.double_kets[0].mapv(|z| z * phase);
        shuffled.align_to(&sys).unwrap();
        for n in 0..2 {
            assert!((shuffled.energies[n] - sys.energies[n]).norm() < 1e-12);
            let diff: f64 = shuffled
                .ket(n)
                .iter()
                .zip(sys.ket(n).iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 1e-12);
        }
        assert!(shuffled.biorthonormality_defect() < 1e-12);
    }
}
