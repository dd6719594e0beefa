//! Time evolution in the Heisenberg and Schrödinger pictures.
//!
//! For a time-independent, possibly non-Hermitian `H`:
//!
//! * observables follow `iħ dχ/dt = [χ, H]`, solved by
//!   `χ(t) = e^{iHt/ħ} χ e^{−iHt/ħ}`;
//! * densities follow `dρ/dt = −(i/ħ)[H₊, ρ] + (1/ħ)[Γ, ρ]₊`, solved by
//!   `ρ(t) = e^{−iHt/ħ} ρ e^{iH†t/ħ}`;
//! * state vectors follow `dΨ/dt = −(i/ħ)HΨ`.
//!
//! The two pictures give different expectation values unless `H` is
//! Hermitian; [`compare_pictures`] measures the difference.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bracket::{bracket, make_omega_minus_plus, make_omega_xi, BracketMatrix};
use crate::error::{Error, Result};
use crate::operator::{
    anticommutator, c, check_dims, commutator, hermitian_split, hermiticity_defect, matrix_exponential, Operator, C64,
};

/// Tolerance on `‖𝓗 − 𝓗†‖_F / max(1, ‖𝓗‖_F)` for an `Ω_ξ` generator.
pub const GENERATOR_HERMITICITY_TOL: f64 = 1e-12;

/// Smallest `|Tr ρ|` accepted when normalizing expectation values.
pub const TRACE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyOperator);
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        if amplitudes.norm() == 0.0 {
            return Err(Error::InvalidParameter("initial state has zero norm".into()));
        }
        Ok(StateVector(amplitudes))
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    /// `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut v = DVector::zeros(dim);
        v[k] = c(1.0, 0.0);
        StateVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `|Ψ⟩⟨Ψ|`
    pub fn projector(&self) -> Operator {
        Operator::from_matrix_unchecked(&self.0 * self.0.adjoint())
    }

    fn apply(op: &Operator, v: &StateVector) -> StateVector {
        StateVector(op.apply(&v.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Picture {
    HeisenbergObservable,
    SchrodingerDensity,
    SchrodingerState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    Exact,
    Rk4,
}

/// The object carried through an evolution.
#[derive(Debug, Clone, PartialEq)]
pub enum Evolving {
    Observable(Operator),
    Density(Operator),
    State(StateVector),
}

impl Evolving {
    pub fn dim(&self) -> usize {
        match self {
            Evolving::Observable(op) | Evolving::Density(op) => op.dim(),
            Evolving::State(v) => v.dim(),
        }
    }

    fn matches(&self, picture: Picture) -> bool {
        matches!(
            (self, picture),
            (Evolving::Observable(_), Picture::HeisenbergObservable)
                | (Evolving::Density(_), Picture::SchrodingerDensity)
                | (Evolving::State(_), Picture::SchrodingerState)
        )
    }

    pub fn as_operator(&self) -> Option<&Operator> {
        match self {
            Evolving::Observable(op) | Evolving::Density(op) => Some(op),
            Evolving::State(_) => None,
        }
    }

    pub fn as_state(&self) -> Option<&StateVector> {
        match self {
            Evolving::State(v) => Some(v),
            _ => None,
        }
    }
}

/// A single evolution job with a time-independent Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSpec {
    pub hamiltonian: Operator,
    pub hbar: f64,
    pub picture: Picture,
    pub integrator: Integrator,
    pub dt: f64,
    pub t_final: f64,
    /// Divide density expectations by `Tr ρ` when reporting.
    pub normalize: bool,
}

impl EvolutionSpec {
    pub fn new(hamiltonian: Operator, picture: Picture, integrator: Integrator, dt: f64, t_final: f64) -> Result<Self> {
        let spec = EvolutionSpec { hamiltonian, hbar: 1.0, picture, integrator, dt, t_final, normalize: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        validate_hbar(self.hbar)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidParameter(format!("t_final must be nonnegative, got {}", self.t_final)));
        }
        if self.t_final > 0.0 && self.dt > self.t_final {
            return Err(Error::InvalidParameter("dt exceeds t_final".into()));
        }
        step_count(self.dt, self.t_final).map(|_| ())
    }

    pub fn n_steps(&self) -> usize {
        step_count(self.dt, self.t_final).expect("validated spec")
    }
}

/// Number of `dt` steps spanning `[0, t_final]`; `t_final` must be a
/// multiple of `dt` to within 1e-9 relative.
pub fn step_count(dt: f64, t_final: f64) -> Result<usize> {
    if t_final == 0.0 {
        return Ok(0);
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final {
        return Err(Error::InvalidParameter(format!("t_final {t_final} is not a multiple of dt {dt}")));
    }
    Ok(n as usize)
}

fn validate_hbar(hbar: f64) -> Result<()> {
    if hbar.is_finite() && hbar > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")))
    }
}

fn validate_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")))
    }
}

/// `dχ/dt = [χ, H]/(iħ)`
pub fn heisenberg_derivative(chi: &Operator, h: &Operator, hbar: f64) -> Result<Operator> {
    Ok(commutator(chi, h)?.scale(c(0.0, -1.0 / hbar)))
}

/// Heisenberg derivative routed through `Ω₋₊(H)` and `H₊`.
pub fn heisenberg_derivative_via_bracket(chi: &Operator, h: &Operator, hbar: f64, cond_cap: f64) -> Result<Operator> {
    check_dims(chi, h)?;
    let omega = make_omega_minus_plus(h, cond_cap)?;
    let h_plus = hermitian_split(h)?.h_plus;
    Ok(bracket(&omega, chi, &h_plus)?.scale(c(0.0, -1.0 / hbar)))
}

/// `dρ/dt = −(i/ħ)[H₊, ρ] + (1/ħ)[Γ, ρ]₊`
pub fn schrodinger_density_derivative(rho: &Operator, h: &Operator, hbar: f64) -> Result<Operator> {
    check_dims(rho, h)?;
    let split = hermitian_split(h)?;
    Ok(commutator(&split.h_plus, rho)?.scale(c(0.0, -1.0 / hbar))
        + anticommutator(&split.gamma, rho)?.scale_real(1.0 / hbar))
}

/// `dΨ/dt = −(i/ħ)HΨ`
pub fn schrodinger_state_derivative(psi: &StateVector, h: &Operator, hbar: f64) -> Result<StateVector> {
    if psi.dim() != h.dim() {
        return Err(Error::DimMismatch { left: psi.dim(), right: h.dim() });
    }
    Ok(StateVector(h.apply(&psi.0) * c(0.0, -1.0 / hbar)))
}

/// `e^{−iHt/ħ}`
pub fn forward_propagator(h: &Operator, hbar: f64, t: f64) -> Result<Operator> {
    validate_hbar(hbar)?;
    matrix_exponential(&h.scale(c(0.0, -t / hbar)))
}

/// `e^{iHt/ħ} χ e^{−iHt/ħ}`
pub fn exact_heisenberg(h: &Operator, chi: &Operator, hbar: f64, t: f64) -> Result<Operator> {
    check_dims(chi, h)?;
    validate_time(t)?;
    let forward = forward_propagator(h, hbar, t)?;
    let backward = matrix_exponential(&h.scale(c(0.0, t / hbar)))?;
    Ok(backward * chi * forward)
}

/// `e^{−iHt/ħ} ρ e^{iH†t/ħ}`
pub fn exact_density(h: &Operator, rho: &Operator, hbar: f64, t: f64) -> Result<Operator> {
    check_dims(rho, h)?;
    validate_time(t)?;
    let forward = forward_propagator(h, hbar, t)?;
    let adj = forward.adjoint();
    Ok(forward * rho * adj)
}

/// `e^{−iHt/ħ} |Ψ⟩`
pub fn exact_state(h: &Operator, psi: &StateVector, hbar: f64, t: f64) -> Result<StateVector> {
    if psi.dim() != h.dim() {
        return Err(Error::DimMismatch { left: psi.dim(), right: h.dim() });
    }
    validate_time(t)?;
    Ok(StateVector::apply(&forward_propagator(h, hbar, t)?, psi))
}

/// Closed-form propagation of `initial` to time `t` in the spec's picture.
pub fn exact_propagate(spec: &EvolutionSpec, initial: &Evolving, t: f64) -> Result<Evolving> {
    check_initial(spec, initial)?;
    let (h, hbar) = (&spec.hamiltonian, spec.hbar);
    Ok(match initial {
        Evolving::Observable(chi) => Evolving::Observable(exact_heisenberg(h, chi, hbar, t)?),
        Evolving::Density(rho) => Evolving::Density(exact_density(h, rho, hbar, t)?),
        Evolving::State(psi) => Evolving::State(exact_state(h, psi, hbar, t)?),
    })
}

fn check_initial(spec: &EvolutionSpec, initial: &Evolving) -> Result<()> {
    if !initial.matches(spec.picture) {
        return Err(Error::InvalidParameter(format!("initial value does not match picture {:?}", spec.picture)));
    }
    if initial.dim() != spec.hamiltonian.dim() {
        return Err(Error::DimMismatch { left: initial.dim(), right: spec.hamiltonian.dim() });
    }
    Ok(())
}

/// Vector-space operations needed by [`rk4_propagate`].
pub trait OdeState: Clone {
    /// `self + a·x`
    fn axpy(&self, a: f64, x: &Self) -> Self;
    fn all_finite(&self) -> bool;
}

impl OdeState for Operator {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        self + x.scale_real(a)
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for StateVector {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        StateVector(&self.0 + &x.0 * c(a, 0.0))
    }

    fn all_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl OdeState for Evolving {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        match (self, x) {
            (Evolving::Observable(p), Evolving::Observable(q)) => Evolving::Observable(p.axpy(a, q)),
            (Evolving::Density(p), Evolving::Density(q)) => Evolving::Density(p.axpy(a, q)),
            (Evolving::State(p), Evolving::State(q)) => Evolving::State(p.axpy(a, q)),
            _ => panic!("mismatched evolving kinds"),
        }
    }

    fn all_finite(&self) -> bool {
        match self {
            Evolving::Observable(op) | Evolving::Density(op) => op.is_finite(),
            Evolving::State(v) => v.all_finite(),
        }
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<S: OdeState>(derivative: &impl Fn(&S) -> S, y: &S, dt: f64) -> S {
    let k1 = derivative(y);
    let k2 = derivative(&y.axpy(0.5 * dt, &k1));
    let k3 = derivative(&y.axpy(0.5 * dt, &k2));
    let k4 = derivative(&y.axpy(dt, &k3));
    y.axpy(dt / 6.0, &k1).axpy(dt / 3.0, &k2).axpy(dt / 3.0, &k3).axpy(dt / 6.0, &k4)
}

/// Fixed-step RK4; the trajectory holds `initial` plus one sample per step.
pub fn rk4_propagate<S: OdeState>(derivative: impl Fn(&S) -> S, initial: S, dt: f64, n_steps: usize) -> Result<Vec<S>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let mut trajectory = Vec::with_capacity(n_steps + 1);
    trajectory.push(initial);
    for step in 1..=n_steps {
        let next = rk4_step(&derivative, trajectory.last().expect("nonempty"), dt);
        if !next.all_finite() {
            return Err(Error::NonFiniteState { step });
        }
        trajectory.push(next);
    }
    Ok(trajectory)
}

/// Sampled evolution on the grid `t_k = k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Evolving>,
}

/// Evolve `initial` over `[0, t_final]` with the spec's picture and integrator.
pub fn evolve(spec: &EvolutionSpec, initial: &Evolving) -> Result<Trajectory> {
    spec.validate()?;
    check_initial(spec, initial)?;
    let n = spec.n_steps();
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * spec.dt).collect();
    let states = match spec.integrator {
        Integrator::Exact => times.iter().map(|&t| exact_propagate(spec, initial, t)).collect::<Result<Vec<_>>>()?,
        Integrator::Rk4 => {
            let (h, hbar) = (&spec.hamiltonian, spec.hbar);
            let f = |y: &Evolving| -> Evolving {
                match y {
                    Evolving::Observable(chi) => {
                        Evolving::Observable(heisenberg_derivative(chi, h, hbar).expect("dims checked"))
                    }
                    Evolving::Density(rho) => {
                        Evolving::Density(schrodinger_density_derivative(rho, h, hbar).expect("dims checked"))
                    }
                    Evolving::State(psi) => {
                        Evolving::State(schrodinger_state_derivative(psi, h, hbar).expect("dims checked"))
                    }
                }
            };
            rk4_propagate(f, initial.clone(), spec.dt, n)?
        }
    };
    Ok(Trajectory { times, states })
}

/// `Tr(ρχ)`, divided by `Tr ρ` when `normalize` is set.
pub fn expectation_value(rho: &Operator, chi: &Operator, normalize: bool) -> Result<C64> {
    check_dims(rho, chi)?;
    let value = (rho * chi).trace();
    if !normalize {
        return Ok(value);
    }
    let tr = rho.trace();
    if tr.norm() <= TRACE_FLOOR {
        return Err(Error::VanishingTrace { trace: tr.norm() });
    }
    Ok(value / tr)
}

/// `⟨Ψ|χ|Ψ⟩`, divided by `⟨Ψ|Ψ⟩` when `normalize` is set.
pub fn state_expectation(psi: &StateVector, chi: &Operator, normalize: bool) -> Result<C64> {
    if psi.dim() != chi.dim() {
        return Err(Error::DimMismatch { left: psi.dim(), right: chi.dim() });
    }
    let value = psi.0.dotc(&chi.apply(&psi.0));
    if !normalize {
        return Ok(value);
    }
    let norm2 = psi.0.norm_squared();
    if norm2 <= TRACE_FLOOR {
        return Err(Error::VanishingTrace { trace: norm2 });
    }
    Ok(value / norm2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PictureComparison {
    /// `Tr(ρ₀ χ(t))`
    pub heisenberg: C64,
    /// `Tr(ρ(t) χ₀)`
    pub schrodinger: C64,
    /// `|heisenberg − schrodinger|`
    pub gap: f64,
}

pub fn compare_pictures(
    h: &Operator,
    rho0: &Operator,
    chi0: &Operator,
    hbar: f64,
    t: f64,
) -> Result<PictureComparison> {
    check_dims(h, rho0)?;
    check_dims(h, chi0)?;
    let heisenberg = expectation_value(rho0, &exact_heisenberg(h, chi0, hbar, t)?, false)?;
    let schrodinger = expectation_value(&exact_density(h, rho0, hbar, t)?, chi0, false)?;
    Ok(PictureComparison { heisenberg, schrodinger, gap: (heisenberg - schrodinger).norm() })
}

/// Check that `𝓗` may serve as an `Ω_ξ` generator.
pub fn check_generator(hcal: &Operator) -> Result<()> {
    let defect = hermiticity_defect(hcal).0;
    if defect > GENERATOR_HERMITICITY_TOL * hcal.frobenius_norm().max(1.0) {
        return Err(Error::NonHermitianGenerator { defect });
    }
    Ok(())
}

/// `dχ/dt = (χξ𝓗 − 𝓗ξᵀχ)/(iħ)` for a prebuilt `Ω_ξ`.
pub fn omega_xi_derivative(omega_xi: &BracketMatrix, hcal: &Operator, chi: &Operator, hbar: f64) -> Result<Operator> {
    Ok(bracket(omega_xi, chi, hcal)?.scale(c(0.0, -1.0 / hbar)))
}

/// RK4 integration of `iħ dχ/dt = χξ𝓗 − 𝓗ξᵀχ` with Hermitian `𝓗`.
pub fn omega_xi_flow(
    xi: &Operator,
    hcal: &Operator,
    chi0: &Operator,
    hbar: f64,
    dt: f64,
    n_steps: usize,
) -> Result<Vec<Operator>> {
    validate_hbar(hbar)?;
    check_dims(xi, hcal)?;
    check_dims(chi0, hcal)?;
    check_generator(hcal)?;
    let omega_xi = make_omega_xi(xi)?;
    let f = |chi: &Operator| omega_xi_derivative(&omega_xi, hcal, chi, hbar).expect("dims checked");
    rk4_propagate(f, chi0.clone(), dt, n_steps)
}

/// `log₂(err_coarse / err_fine)` for a step halving.
pub fn observed_order(err_coarse: f64, err_fine: f64) -> f64 {
    (err_coarse / err_fine).log2()
}
