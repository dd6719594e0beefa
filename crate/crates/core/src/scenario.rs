//! Scenario files: declarative simulation jobs.
//!
//! A scenario is a TOML document (schema version 1):
//!
//! ```toml
//! version = 1                              # optional, must be 1
//! name = "dimer"
//! hamiltonian_expr = "pt_dimer(0.5, 1)"
//! xi_expr = "sigma_x"                      # optional: Ω_ξ flow, Hermitian H required
//! observable_expr = "sigma_z"              # required for Heisenberg / Ω_ξ runs
//! initial_density_expr = "proj(2, 0)"      # or initial_state_expr = "ket(2, 0)"
//! picture = "schrodinger-density"          # heisenberg-observable | schrodinger-density | schrodinger-state
//! integrator = "exact"                     # exact | rk4
//! dt = 0.01
//! t_final = 1.0
//! hbar = 1.0                               # default 1
//! normalize = false                        # default false
//! sample_stride = 1                        # default 1
//!
//! [output]                                 # optional; CSV on stdout otherwise
//! path = "dimer.csv"                       # relative to the scenario file
//! format = "csv"                           # csv | json
//! ```
//!
//! Recorded fields per picture:
//!
//! * `schrodinger-density`: `trace` (complex), `min_eig` (lowest eigenvalue
//!   of the Hermitian part of ρ), `herm_defect` (‖ρ − ρ†‖_F), and `chi_exp`
//!   (Tr ρχ, divided by Tr ρ when normalizing) if an observable is given.
//! * `schrodinger-state`: `norm`, and `chi_exp` (⟨Ψ|χ|Ψ⟩) if an observable
//!   is given.
//! * `heisenberg-observable` and Ω_ξ runs: `chi_trace` (Tr χ),
//!   `herm_defect` (‖χ − χ†‖_F), and `chi_exp` (Tr ρ₀χ(t)) if an initial
//!   state or density is given.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::dsl::{evaluate, evaluate_state, parse_expression, DslError};
use crate::dynamics::{
    check_generator, compare_pictures, evolve, expectation_value, omega_xi_flow, state_expectation, EvolutionSpec,
    Evolving, Integrator, Picture, PictureComparison, StateVector,
};
use crate::error::Error;
use crate::operator::{hermitian_eigenvalues, hermiticity_defect, Operator};
use crate::timeseries::{FieldKind, Format, Sample, TimeSeries, TimeSeriesError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("in `{field}`: {message}")]
    Expression { field: &'static str, message: String, source: Box<DslError> },
    #[error("`{field}` has dimension {got}, expected {expected}")]
    DimMismatch { field: &'static str, expected: usize, got: usize },
    #[error("hamiltonian is not Hermitian (defect {defect:.3e}); required with xi_expr")]
    NonHermitianGenerator { defect: f64 },
    #[error(transparent)]
    Dynamics(#[from] Error),
    #[error(transparent)]
    Output(#[from] TimeSeriesError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    version: Option<u32>,
    name: String,
    hamiltonian_expr: String,
    xi_expr: Option<String>,
    observable_expr: Option<String>,
    initial_state_expr: Option<String>,
    initial_density_expr: Option<String>,
    picture: Picture,
    integrator: Integrator,
    dt: f64,
    t_final: f64,
    hbar: Option<f64>,
    normalize: Option<bool>,
    sample_stride: Option<usize>,
    output: Option<OutputFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputFile {
    path: PathBuf,
    format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTarget {
    pub path: PathBuf,
    pub format: Format,
}

/// Initial state or density supplied by a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    State(StateVector),
    Density(Operator),
}

impl Initial {
    fn dim(&self) -> usize {
        match self {
            Initial::State(v) => v.dim(),
            Initial::Density(op) => op.dim(),
        }
    }

    /// The density matrix, forming |Ψ⟩⟨Ψ| for states.
    pub fn density(&self) -> Operator {
        match self {
            Initial::State(v) => v.projector(),
            Initial::Density(op) => op.clone(),
        }
    }
}

/// A validated scenario with all expressions evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub hamiltonian_expr: String,
    pub xi_expr: Option<String>,
    pub observable_expr: Option<String>,
    pub hamiltonian: Operator,
    pub xi: Option<Operator>,
    pub observable: Option<Operator>,
    pub initial: Option<Initial>,
    pub spec: EvolutionSpec,
    pub sample_stride: usize,
    pub output: Option<OutputTarget>,
}

fn schema(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema(msg.into())
}

fn operator_field(field: &'static str, text: &str) -> Result<Operator, ScenarioError> {
    parse_expression(text).and_then(|ast| evaluate(&ast)).map_err(|source| ScenarioError::Expression {
        field,
        message: source.render(text),
        source: Box::new(source),
    })
}

fn state_field(field: &'static str, text: &str) -> Result<StateVector, ScenarioError> {
    parse_expression(text).and_then(|ast| evaluate_state(&ast)).map_err(|source| ScenarioError::Expression {
        field,
        message: source.render(text),
        source: Box::new(source),
    })
}

fn same_dim(field: &'static str, expected: usize, got: usize) -> Result<(), ScenarioError> {
    if expected == got {
        Ok(())
    } else {
        Err(ScenarioError::DimMismatch { field, expected, got })
    }
}

/// Read and validate a scenario file. Relative output paths resolve against
/// the file's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    if !path.exists() {
        return Err(ScenarioError::FileNotFound(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    let mut scenario = parse_scenario(&text)?;
    if let Some(out) = &mut scenario.output {
        if out.path.is_relative() {
            out.path = path.parent().unwrap_or(Path::new(".")).join(&out.path);
        }
    }
    Ok(scenario)
}

/// Validate scenario text; output paths are left as written.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| schema(e.message().to_string()))?;
    if let Some(v) = file.version {
        if v != SCHEMA_VERSION {
            return Err(schema(format!("unsupported schema version {v}, expected {SCHEMA_VERSION}")));
        }
    }
    if file.name.trim().is_empty() {
        return Err(schema("`name` must not be empty"));
    }
    let hbar = file.hbar.unwrap_or(1.0);
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(schema(format!("`hbar` must be positive, got {hbar}")));
    }
    if !(file.dt.is_finite() && file.dt > 0.0) {
        return Err(schema(format!("`dt` must be positive, got {}", file.dt)));
    }
    if !(file.t_final.is_finite() && file.t_final >= 0.0) {
        return Err(schema(format!("`t_final` must be nonnegative, got {}", file.t_final)));
    }
    let sample_stride = file.sample_stride.unwrap_or(1);
    if sample_stride == 0 {
        return Err(schema("`sample_stride` must be at least 1"));
    }

    let hamiltonian = operator_field("hamiltonian_expr", &file.hamiltonian_expr)?;
    let dim = hamiltonian.dim();
    let observable = file.observable_expr.as_deref().map(|t| operator_field("observable_expr", t)).transpose()?;
    if let Some(op) = &observable {
        same_dim("observable_expr", dim, op.dim())?;
    }
    let initial = match (&file.initial_state_expr, &file.initial_density_expr) {
        (Some(_), Some(_)) => {
            return Err(schema("give at most one of `initial_state_expr` and `initial_density_expr`"))
        }
        (Some(t), None) => Some(Initial::State(state_field("initial_state_expr", t)?)),
        (None, Some(t)) => Some(Initial::Density(operator_field("initial_density_expr", t)?)),
        (None, None) => None,
    };
    if let Some(init) = &initial {
        let field = match init {
            Initial::State(_) => "initial_state_expr",
            Initial::Density(_) => "initial_density_expr",
        };
        same_dim(field, dim, init.dim())?;
    }

    match file.picture {
        Picture::HeisenbergObservable if observable.is_none() => {
            return Err(schema("`observable_expr` is required for the heisenberg-observable picture"))
        }
        Picture::SchrodingerDensity if initial.is_none() => {
            return Err(schema("schrodinger-density needs `initial_density_expr` or `initial_state_expr`"))
        }
        Picture::SchrodingerState if !matches!(initial, Some(Initial::State(_))) => {
            return Err(schema("schrodinger-state needs `initial_state_expr`"))
        }
        _ => {}
    }

    let xi = match &file.xi_expr {
        None => None,
        Some(t) => {
            if file.picture != Picture::HeisenbergObservable {
                return Err(schema("`xi_expr` requires picture = \"heisenberg-observable\""));
            }
            if file.integrator != Integrator::Rk4 {
                return Err(schema("`xi_expr` flows have no closed form; use integrator = \"rk4\""));
            }
            let xi = operator_field("xi_expr", t)?;
            same_dim("xi_expr", dim, xi.dim())?;
            check_generator(&hamiltonian).map_err(|e| match e {
                Error::NonHermitianGenerator { defect } => ScenarioError::NonHermitianGenerator { defect },
                other => ScenarioError::Dynamics(other),
            })?;
            Some(xi)
        }
    };

    let spec = EvolutionSpec {
        hamiltonian: hamiltonian.clone(),
        hbar,
        picture: file.picture,
        integrator: file.integrator,
        dt: file.dt,
        t_final: file.t_final,
        normalize: file.normalize.unwrap_or(false),
    };
    spec.validate().map_err(|e| schema(e.to_string()))?;

    Ok(Scenario {
        name: file.name,
        hamiltonian_expr: file.hamiltonian_expr,
        xi_expr: file.xi_expr,
        observable_expr: file.observable_expr,
        hamiltonian,
        xi,
        observable,
        initial,
        spec,
        sample_stride,
        output: file.output.map(|o| OutputTarget { path: o.path, format: o.format.unwrap_or(Format::Csv) }),
    })
}

fn sampled_indices(n_steps: usize, stride: usize) -> impl Iterator<Item = usize> {
    (0..=n_steps).filter(move |k| k % stride == 0 || *k == n_steps)
}

/// Run a scenario and collect its sampled observables. Deterministic.
pub fn run_scenario(s: &Scenario) -> Result<TimeSeries, ScenarioError> {
    let spec = &s.spec;
    let n = spec.n_steps();
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * spec.dt).collect();

    let states: Vec<Evolving> = match (&s.xi, spec.picture) {
        (Some(xi), _) => {
            let chi0 = s.observable.as_ref().expect("validated");
            omega_xi_flow(xi, &s.hamiltonian, chi0, spec.hbar, spec.dt, n)?
                .into_iter()
                .map(Evolving::Observable)
                .collect()
        }
        (None, Picture::HeisenbergObservable) => {
            evolve(spec, &Evolving::Observable(s.observable.clone().expect("validated")))?.states
        }
        (None, Picture::SchrodingerDensity) => {
            evolve(spec, &Evolving::Density(s.initial.as_ref().expect("validated").density()))?.states
        }
        (None, Picture::SchrodingerState) => {
            let Some(Initial::State(psi)) = &s.initial else { unreachable!("validated") };
            evolve(spec, &Evolving::State(psi.clone()))?.states
        }
    };

    let chi_exp = ("chi_exp".to_string(), FieldKind::Complex);
    let fields = match spec.picture {
        Picture::SchrodingerDensity => {
            let mut f = vec![
                ("trace".to_string(), FieldKind::Complex),
                ("min_eig".to_string(), FieldKind::Real),
                ("herm_defect".to_string(), FieldKind::Real),
            ];
            if s.observable.is_some() {
                f.push(chi_exp);
            }
            f
        }
        Picture::SchrodingerState => {
            let mut f = vec![("norm".to_string(), FieldKind::Real)];
            if s.observable.is_some() {
                f.push(chi_exp);
            }
            f
        }
        Picture::HeisenbergObservable => {
            let mut f =
                vec![("chi_trace".to_string(), FieldKind::Complex), ("herm_defect".to_string(), FieldKind::Real)];
            if s.initial.is_some() {
                f.push(chi_exp);
            }
            f
        }
    };

    let rho0 = s.initial.as_ref().map(Initial::density);
    let mut ts = TimeSeries::new(fields);
    for k in sampled_indices(n, s.sample_stride) {
        let record = match &states[k] {
            Evolving::Density(rho) => {
                let mut r = vec![
                    Sample::Complex(rho.trace()),
                    Sample::Real(hermitian_eigenvalues(rho)[0]),
                    Sample::Real(hermiticity_defect(rho).0),
                ];
                if let Some(chi) = &s.observable {
                    r.push(Sample::Complex(expectation_value(rho, chi, spec.normalize)?));
                }
                r
            }
            Evolving::State(psi) => {
                let mut r = vec![Sample::Real(psi.norm())];
                if let Some(chi) = &s.observable {
                    r.push(Sample::Complex(state_expectation(psi, chi, spec.normalize)?));
                }
                r
            }
            Evolving::Observable(chi) => {
                let mut r = vec![Sample::Complex(chi.trace()), Sample::Real(hermiticity_defect(chi).0)];
                if let Some(rho0) = &rho0 {
                    r.push(Sample::Complex(expectation_value(rho0, chi, spec.normalize)?));
                }
                r
            }
        };
        ts.push(times[k], record)?;
    }
    Ok(ts)
}

/// Heisenberg versus Schrödinger expectation of the scenario's observable
/// at time `t`, using exact propagators.
pub fn compare_scenario_pictures(s: &Scenario, t: f64) -> Result<PictureComparison, ScenarioError> {
    let chi0 = s.observable.as_ref().ok_or_else(|| schema("compare-pictures needs `observable_expr`"))?;
    let rho0 = s
        .initial
        .as_ref()
        .ok_or_else(|| schema("compare-pictures needs `initial_density_expr` or `initial_state_expr`"))?
        .density();
    Ok(compare_pictures(&s.hamiltonian, &rho0, chi0, s.spec.hbar, t)?)
}

/// `Tr ρ` at the final sample of a density run, if present.
pub fn final_trace(ts: &TimeSeries) -> Option<f64> {
    ts.complex_column("trace")?.last().map(|z| z.re)
}
