//! Scenario files: a human-editable TOML description of one reconstruction
//! run.
//!
//! A scenario names its input kind (`one`, `two`, or `three`), carries exactly
//! the payload that kind needs, and may add weights, observables, tolerance
//! overrides, a step count, and a seed for the probe state. Complex entries
//! are written as plain numbers, `[re, im]` pairs, or strings like `"1+2i"`;
//! matrices are row-major arrays of rows.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::family::{ClosedForm, OperatorFamily};
use crate::grid::TimeGrid;
use crate::operator::SquareOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    One,
    Two,
    Three,
}

impl std::fmt::Display for InputKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputKind::One => write!(f, "one"),
            InputKind::Two => write!(f, "two"),
            InputKind::Three => write!(f, "three"),
        }
    }
}

/// How a strategy-three run obtains its initial biorthonormal basis.
#[derive(Debug, Clone)]
pub enum InitialBasis {
    /// Diagonalize this operator at the initial time.
    FromHamiltonian(SquareOperator),
    /// Explicit kets and double-kets, one per column.
    Explicit { kets: Array2<C64>, double_kets: Array2<C64> },
}

/// Validated input payload, one variant per input kind.
#[derive(Debug, Clone)]
pub enum ScenarioInput {
    Hamiltonian { family: FamilySource },
    Coriolis {
        coriolis: FamilySource,
        ansatz: FamilySource,
        omega0: Option<SquareOperator>,
        symmetrize_ansatz: bool,
    },
    Generator { generator: FamilySource, initial_basis: InitialBasis },
}

impl ScenarioInput {
    pub fn kind(&self) -> InputKind {
        match self {
            ScenarioInput::Hamiltonian { .. } => InputKind::One,
            ScenarioInput::Coriolis { .. } => InputKind::Two,
            ScenarioInput::Generator { .. } => InputKind::Three,
        }
    }
}

/// Either an analytic rule or explicit per-sample values.
#[derive(Debug, Clone)]
pub enum FamilySource {
    Form(ClosedForm),
    Samples(Vec<SquareOperator>),
}

impl FamilySource {
    pub fn build(&self, grid: &TimeGrid) -> Result<OperatorFamily> {
        match self {
            FamilySource::Form(form) => OperatorFamily::from_closed_form(grid.clone(), form.clone()),
            FamilySource::Samples(values) => {
                OperatorFamily::from_samples(grid.clone(), values.clone())
            }
        }
    }
}

/// Optional overrides for the runner's check tolerances.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub spectral: Option<f64>,
    pub quasi_hermiticity: Option<f64>,
    pub factorization: Option<f64>,
    pub flow: Option<f64>,
    pub unitarity: Option<f64>,
    pub frame: Option<f64>,
}

/// A fully validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub dim: usize,
    pub grid: TimeGrid,
    pub input: ScenarioInput,
    pub kappa: Option<Vec<f64>>,
    pub observables: Vec<(String, FamilySource)>,
    pub steps_per_sample: usize,
    pub seed: u64,
    pub tolerances: ToleranceOverrides,
}

impl Scenario {
    pub fn kind(&self) -> InputKind {
        self.input.kind()
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text)
            .map_err(|e| Error::InvalidScenario(format!("TOML parse failure: {e}")))?;
        raw.validate()
    }
}

// ---------------------------------------------------------------------------
// raw (serde) layer
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    dim: usize,
    kind: String,
    grid: RawGrid,
    kappa: Option<Vec<f64>>,
    seed: Option<u64>,
    steps_per_sample: Option<usize>,
    #[serde(default)]
    tolerances: ToleranceOverrides,
    input: RawInput,
    #[serde(default)]
    observables: Vec<RawObservable>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    end: f64,
    samples: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    hamiltonian: Option<RawFamily>,
    coriolis: Option<RawFamily>,
    ansatz: Option<RawFamily>,
    omega0: Option<RawMatrix>,
    symmetrize_ansatz: Option<bool>,
    generator: Option<RawFamily>,
    initial_basis: Option<RawBasis>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    hamiltonian: Option<RawMatrix>,
    kets: Option<RawMatrix>,
    double_kets: Option<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservable {
    label: String,
    matrix: Option<RawMatrix>,
    family: Option<RawFamily>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    matrix: Option<RawMatrix>,
    coefficients: Option<Vec<RawMatrix>>,
    amplitude: Option<RawMatrix>,
    rate: Option<RawMatrix>,
    generator: Option<RawMatrix>,
    prefactor: Option<RawMatrix>,
    values: Option<Vec<RawMatrix>>,
    terms: Option<Vec<RawFamily>>,
}

type RawMatrix = Vec<Vec<RawComplex>>;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

/// Parse `"a+bi"`-style complex literals: `1`, `-2.5`, `i`, `-i`, `0.5i`,
/// `1+2i`, `1.5e-3-0.5i`.
fn parse_complex(text: &str) -> Result<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::InvalidScenario("empty complex literal".into()));
    }
    let bad = || Error::InvalidScenario(format!("cannot parse complex literal '{text}'"));
    if !s.ends_with('i') {
        return s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    }
    let body = &s[..s.len() - 1];
    // split at the last +/- that is not a leading sign or exponent sign
    let mut split = None;
    for (idx, ch) in body.char_indices().rev() {
        if (ch == '+' || ch == '-') && idx != 0 {
            let prev = body.as_bytes()[idx - 1] as char;
            if prev != 'e' && prev != 'E' {
                split = Some(idx);
                break;
            }
        }
    }
    match split {
        Some(idx) => {
            let re: f64 = body[..idx].parse().map_err(|_| bad())?;
            let im_text = &body[idx..];
            let im: f64 = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                other => other.parse().map_err(|_| bad())?,
            };
            Ok(C64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" => 1.0,
                "-" => -1.0,
                "+" => 1.0,
                other => other.parse().map_err(|_| bad())?,
            };
            Ok(C64::new(0.0, im))
        }
    }
}

fn build_matrix(raw: &RawMatrix, dim: usize, what: &str) -> Result<SquareOperator> {
    if raw.len() != dim || raw.iter().any(|row| row.len() != dim) {
        return Err(Error::InvalidScenario(format!(
            "{what}: expected a {dim}x{dim} matrix"
        )));
    }
    let mut rows = Vec::with_capacity(dim);
    for row in raw {
        let mut out = Vec::with_capacity(dim);
        for entry in row {
            out.push(match entry {
                RawComplex::Real(x) => C64::new(*x, 0.0),
                RawComplex::Pair([re, im]) => C64::new(*re, *im),
                RawComplex::Text(t) => parse_complex(t)?,
            });
        }
        rows.push(out);
    }
    SquareOperator::from_rows(&rows)
}

fn build_family(raw: &RawFamily, dim: usize, samples: usize, what: &str) -> Result<FamilySource> {
    let get = |m: &Option<RawMatrix>, field: &str| -> Result<SquareOperator> {
        let raw = m.as_ref().ok_or_else(|| {
            Error::InvalidScenario(format!("{what}: '{}' family needs '{field}'", raw.kind))
        })?;
        build_matrix(raw, dim, what)
    };
    match raw.kind.as_str() {
        "constant" => Ok(FamilySource::Form(ClosedForm::Constant(get(&raw.matrix, "matrix")?))),
        "polynomial" => {
            let coeffs = raw.coefficients.as_ref().ok_or_else(|| {
                Error::InvalidScenario(format!("{what}: polynomial family needs 'coefficients'"))
            })?;
            if coeffs.is_empty() {
                return Err(Error::InvalidScenario(format!(
                    "{what}: polynomial family needs at least one coefficient"
                )));
            }
            let ops: Result<Vec<_>> =
                coeffs.iter().map(|m| build_matrix(m, dim, what)).collect();
            Ok(FamilySource::Form(ClosedForm::Polynomial(ops?)))
        }
        "entrywise_exp" => Ok(FamilySource::Form(ClosedForm::EntrywiseExp {
            amplitude: get(&raw.amplitude, "amplitude")?,
            rate: get(&raw.rate, "rate")?,
        })),
        "exp_generator" => {
            let generator = get(&raw.generator, "generator")?;
            let prefactor = match &raw.prefactor {
                Some(m) => build_matrix(m, dim, what)?,
                None => SquareOperator::identity(dim),
            };
            Ok(FamilySource::Form(ClosedForm::ExpGenerator { prefactor, generator }))
        }
        "samples" => {
            let values = raw.values.as_ref().ok_or_else(|| {
                Error::InvalidScenario(format!("{what}: samples family needs 'values'"))
            })?;
            if values.len() != samples {
                return Err(Error::InvalidScenario(format!(
                    "{what}: samples family holds {} matrices but the grid has {samples}",
                    values.len()
                )));
            }
            let ops: Result<Vec<_>> = values.iter().map(|m| build_matrix(m, dim, what)).collect();
            Ok(FamilySource::Samples(ops?))
        }
        "sum" => {
            let terms = raw.terms.as_ref().ok_or_else(|| {
                Error::InvalidScenario(format!("{what}: sum family needs 'terms'"))
            })?;
            let mut forms = Vec::with_capacity(terms.len());
            for term in terms {
                match build_family(term, dim, samples, what)? {
                    FamilySource::Form(f) => forms.push(f),
                    FamilySource::Samples(_) => {
                        return Err(Error::InvalidScenario(format!(
                            "{what}: sum terms must be analytic families"
                        )))
                    }
                }
            }
            if forms.is_empty() {
                return Err(Error::InvalidScenario(format!("{what}: empty sum family")));
            }
            Ok(FamilySource::Form(ClosedForm::Sum(forms)))
        }
        other => Err(Error::InvalidScenario(format!(
            "{what}: unknown family kind '{other}' \
             (expected constant|polynomial|entrywise_exp|exp_generator|samples|sum)"
        ))),
    }
}

fn columns_matrix(op: &SquareOperator) -> Array2<C64> {
    op.mat().clone()
}

impl RawScenario {
    fn validate(self) -> Result<Scenario> {
        if self.dim == 0 {
            return Err(Error::InvalidScenario("dim must be at least 1".into()));
        }
        let grid = TimeGrid::new(self.grid.start, self.grid.end, self.grid.samples)
            .map_err(|_| Error::InvalidScenario("grid must satisfy start < end, samples >= 2".into()))?;
        let samples = grid.len();

        if let Some(kappa) = &self.kappa {
            if kappa.len() != self.dim {
                return Err(Error::InvalidScenario(format!(
                    "kappa holds {} weights for dimension {}",
                    kappa.len(),
                    self.dim
                )));
            }
            if kappa.iter().any(|k| !(*k > 0.0)) {
                return Err(Error::InvalidScenario("kappa weights must be positive".into()));
            }
        }

        let input = self.build_input(samples, &grid)?;

        let mut observables = Vec::with_capacity(self.observables.len());
        for raw in &self.observables {
            let source = match (&raw.matrix, &raw.family) {
                (Some(m), None) => {
                    FamilySource::Form(ClosedForm::Constant(build_matrix(m, self.dim, &raw.label)?))
                }
                (None, Some(f)) => build_family(f, self.dim, samples, &raw.label)?,
                _ => {
                    return Err(Error::InvalidScenario(format!(
                        "observable '{}' needs exactly one of 'matrix' or 'family'",
                        raw.label
                    )))
                }
            };
            observables.push((raw.label.clone(), source));
        }

        Ok(Scenario {
            name: self.name,
            dim: self.dim,
            grid,
            input,
            kappa: self.kappa,
            observables,
            steps_per_sample: self.steps_per_sample.unwrap_or(1).max(1),
            seed: self.seed.unwrap_or(0),
            tolerances: self.tolerances,
        })
    }

    fn build_input(&self, samples: usize, _grid: &TimeGrid) -> Result<ScenarioInput> {
        let i = &self.input;
        let reject = |field: &str, kind: &str| {
            Error::InvalidScenario(format!("input '{field}' does not belong to kind '{kind}'"))
        };
        match self.kind.as_str() {
            "one" => {
                for (present, name) in [
                    (i.coriolis.is_some(), "coriolis"),
                    (i.ansatz.is_some(), "ansatz"),
                    (i.omega0.is_some(), "omega0"),
                    (i.generator.is_some(), "generator"),
                    (i.initial_basis.is_some(), "initial_basis"),
                    (i.symmetrize_ansatz.is_some(), "symmetrize_ansatz"),
                ] {
                    if present {
                        return Err(reject(name, "one"));
                    }
                }
                let family = i.hamiltonian.as_ref().ok_or_else(|| {
                    Error::InvalidScenario("kind 'one' needs input.hamiltonian".into())
                })?;
                Ok(ScenarioInput::Hamiltonian {
                    family: build_family(family, self.dim, samples, "hamiltonian")?,
                })
            }
            "two" => {
                for (present, name) in [
                    (i.hamiltonian.is_some(), "hamiltonian"),
                    (i.generator.is_some(), "generator"),
                    (i.initial_basis.is_some(), "initial_basis"),
                ] {
                    if present {
                        return Err(reject(name, "two"));
                    }
                }
                let coriolis = i.coriolis.as_ref().ok_or_else(|| {
                    Error::InvalidScenario("kind 'two' needs input.coriolis".into())
                })?;
                let ansatz = i.ansatz.as_ref().ok_or_else(|| {
                    Error::InvalidScenario("kind 'two' needs input.ansatz".into())
                })?;
                let omega0 = match &i.omega0 {
                    Some(m) => Some(build_matrix(m, self.dim, "omega0")?),
                    None => None,
                };
                Ok(ScenarioInput::Coriolis {
                    coriolis: build_family(coriolis, self.dim, samples, "coriolis")?,
                    ansatz: build_family(ansatz, self.dim, samples, "ansatz")?,
                    omega0,
                    symmetrize_ansatz: i.symmetrize_ansatz.unwrap_or(false),
                })
            }
            "three" => {
                for (present, name) in [
                    (i.hamiltonian.is_some(), "hamiltonian"),
                    (i.coriolis.is_some(), "coriolis"),
                    (i.ansatz.is_some(), "ansatz"),
                    (i.omega0.is_some(), "omega0"),
                    (i.symmetrize_ansatz.is_some(), "symmetrize_ansatz"),
                ] {
                    if present {
                        return Err(reject(name, "three"));
                    }
                }
                let generator = i.generator.as_ref().ok_or_else(|| {
                    Error::InvalidScenario("kind 'three' needs input.generator".into())
                })?;
                let basis = i.initial_basis.as_ref().ok_or_else(|| {
                    Error::InvalidScenario("kind 'three' needs input.initial_basis".into())
                })?;
                let initial_basis = match (&basis.hamiltonian, &basis.kets, &basis.double_kets) {
                    (Some(h), None, None) => {
                        InitialBasis::FromHamiltonian(build_matrix(h, self.dim, "initial_basis")?)
                    }
                    (None, Some(k), Some(d)) => InitialBasis::Explicit {
                        kets: columns_matrix(&build_matrix(k, self.dim, "initial_basis.kets")?),
                        double_kets: columns_matrix(&build_matrix(
                            d,
                            self.dim,
                            "initial_basis.double_kets",
                        )?),
                    },
                    _ => {
                        return Err(Error::InvalidScenario(
                            "initial_basis needs either 'hamiltonian' or both 'kets' and \
                             'double_kets'"
                                .into(),
                        ))
                    }
                };
                Ok(ScenarioInput::Generator {
                    generator: build_family(generator, self.dim, samples, "generator")?,
                    initial_basis,
                })
            }
            other => Err(Error::InvalidScenario(format!(
                "unknown kind '{other}' (expected one|two|three)"
            ))),
        }
    }
}

/// Build a probe state for unitarity checks: a deterministic pseudo-random
/// unit vector.
pub fn probe_state(seed: u64, dim: usize) -> Array1<C64> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut v = Array1::<C64>::zeros(dim);
    for x in v.iter_mut() {
        *x = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / C64::new(norm, 0.0))
}
