//! Randomized batch check of the bracket identities.
//!
//! Every identity is exact in real arithmetic, so each entry records the
//! largest relative residual seen over all samples and passes when it is at
//! most `tol`.

use std::fmt;

use crate::bracket::{
    bracket, lambda_closed_form, lambda_density_rhs, make_lambda, make_omega, make_omega_minus_plus, make_omega_xi,
};
use crate::dynamics::schrodinger_density_derivative;
use crate::error::{Error, Result};
use crate::operator::{commutator, hermitian_split, Operator, DEFAULT_COND_CAP};
use crate::sampling::{random_density, random_hermitian, random_operator, regularize_hermitian_part, rng_from_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub dims: Vec<usize>,
    /// Samples per dimension.
    pub n_random: usize,
    pub seed: u64,
    pub tol: f64,
    /// Draw only Hermitian Hamiltonians.
    pub hermitian_only: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { dims: vec![2, 4, 8], n_random: 100, seed: 42, tol: 1e-12, hermitian_only: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub results: Vec<IdentityResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "verify dims={:?} n={} seed={} tol={:e} hermitian_only={}",
            c.dims, c.n_random, c.seed, c.tol, c.hermitian_only
        )?;
        for r in &self.results {
            writeln!(
                f,
                "{:<24} samples={:<5} max_rel_residual={:.6e} {}",
                r.name,
                r.samples,
                r.max_residual,
                if r.passed { "PASS" } else { "FAIL" }
            )?;
        }
        writeln!(f, "overall {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

pub const IDENTITIES: [&str; 6] = [
    "mapping_identity",
    "lambda_bracket",
    "lambda_density_flow",
    "hermitian_reduction",
    "omega_xi_reduction",
    "omega_xi_conservation",
];

fn relative(residual: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        residual
    } else {
        residual / scale
    }
}

/// Run every identity over `n_random` samples per dimension.
pub fn verify_suite(config: &VerifyConfig) -> Result<VerifyReport> {
    if config.dims.is_empty() || config.dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter("dims must be nonempty and each at least 2".into()));
    }
    if config.n_random == 0 {
        return Err(Error::InvalidParameter("n_random must be at least 1".into()));
    }
    let mut rng = rng_from_seed(config.seed);
    let mut worst = [0.0f64; IDENTITIES.len()];
    let mut samples = 0;
    let record = |slot: &mut f64, value: f64| {
        // NaN must surface as a failure.
        if value.is_nan() || value > *slot {
            *slot = value;
        }
    };

    for &dim in &config.dims {
        for _ in 0..config.n_random {
            samples += 1;
            let raw =
                if config.hermitian_only { random_hermitian(dim, &mut rng) } else { random_operator(dim, &mut rng) };
            let h = regularize_hermitian_part(&raw);
            let chi = random_operator(dim, &mut rng);
            let rho = random_density(dim, &mut rng);
            let split = hermitian_split(&h)?;
            let h_norm = h.frobenius_norm();

            let lhs = commutator(&chi, &h)?;
            let omega_mp = make_omega_minus_plus(&h, DEFAULT_COND_CAP)?;
            let rhs = bracket(&omega_mp, &chi, &split.h_plus)?;
            record(&mut worst[0], relative(lhs.distance(&rhs), chi.frobenius_norm() * h_norm));

            let lambda = make_lambda(&h, DEFAULT_COND_CAP)?;
            let via_bracket = bracket(&lambda, &rho, &split.h_plus)?;
            let scale = rho.frobenius_norm() * h_norm;
            record(&mut worst[1], relative(via_bracket.distance(&lambda_closed_form(&rho, &h)?), scale));

            let flow = lambda_density_rhs(&rho, &h, 1.0, DEFAULT_COND_CAP)?;
            record(&mut worst[2], relative(flow.distance(&schrodinger_density_derivative(&rho, &h, 1.0)?), scale));

            let herm = regularize_hermitian_part(&random_hermitian(dim, &mut rng));
            let omega = make_omega(dim);
            let diff = make_omega_minus_plus(&herm, DEFAULT_COND_CAP)?
                .max_abs_diff(&omega)
                .max(make_lambda(&herm, DEFAULT_COND_CAP)?.max_abs_diff(&omega));
            record(&mut worst[3], diff);

            let hcal = random_hermitian(dim, &mut rng);
            let reduced = bracket(&make_omega_xi(&Operator::identity(dim))?, &chi, &hcal)?;
            record(
                &mut worst[4],
                relative(reduced.distance(&commutator(&chi, &hcal)?), chi.frobenius_norm() * hcal.frobenius_norm()),
            );

            let a = random_operator(dim, &mut rng);
            let xi_sym = (&a + &a.transpose()).scale_real(0.5);
            let drift = bracket(&make_omega_xi(&xi_sym)?, &hcal, &hcal)?;
            let scale = xi_sym.frobenius_norm() * hcal.frobenius_norm().powi(2);
            record(&mut worst[5], relative(drift.frobenius_norm(), scale));
        }
    }

    let results = IDENTITIES
        .iter()
        .zip(worst)
        .map(|(&name, max_residual)| IdentityResult { name, samples, max_residual, passed: max_residual <= config.tol })
        .collect();
    Ok(VerifyReport { config: config.clone(), results })
}
