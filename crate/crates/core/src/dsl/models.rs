//! Named Hamiltonian families.

use thiserror::Error;

use crate::operator::{c, Operator};

/// Largest dimension a builtin will generate.
pub const MAX_MODEL_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` takes {expected} parameter(s), got {got}")]
    WrongParamCount { model: String, expected: usize, got: usize },
    #[error("parameter `{param}` of `{model}` is {value}, outside {domain}")]
    ParamOutOfRange { model: String, param: String, value: f64, domain: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub integer: bool,
}

impl ParamSpec {
    const fn real(name: &'static str, min: f64, max: f64) -> Self {
        ParamSpec { name, min, max, integer: false }
    }

    const fn count(name: &'static str, min: usize) -> Self {
        ParamSpec { name, min: min as f64, max: MAX_MODEL_DIM as f64, integer: true }
    }

    fn admits(&self, x: f64) -> bool {
        x.is_finite() && x >= self.min && x <= self.max && (!self.integer || x.fract() == 0.0)
    }

    fn domain(&self) -> String {
        let kind = if self.integer { "integers in" } else { "" };
        format!("{kind}[{}, {}]", self.min, self.max).trim_start().to_string()
    }
}

pub struct ModelCatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [ParamSpec],
    generate: fn(&[f64]) -> Operator,
}

impl std::fmt::Debug for ModelCatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelCatalogEntry").field("name", &self.name).field("params", &self.params).finish()
    }
}

const BIG: f64 = 1e6;

static CATALOG: [ModelCatalogEntry; 3] = [
    ModelCatalogEntry {
        name: "pt_dimer",
        description: "[[iγ, v], [v, −iγ]]: balanced gain/loss dimer, exceptional point at v = γ",
        params: &[ParamSpec::real("gamma", 0.0, BIG), ParamSpec::real("v", 0.0, BIG)],
        generate: pt_dimer,
    },
    ModelCatalogEntry {
        name: "decay",
        description: "−i(γ/2)·Iₙ: uniform loss, Tr ρ decays as e^{−γt}",
        params: &[ParamSpec::real("gamma", 0.0, BIG), ParamSpec::count("n", 1)],
        generate: decay,
    },
    ModelCatalogEntry {
        name: "chain",
        description: "n-site tight-binding chain, hopping j, on-site +ig on even and −ig on odd sites",
        params: &[ParamSpec::count("n", 1), ParamSpec::real("j", -BIG, BIG), ParamSpec::real("g", 0.0, BIG)],
        generate: chain,
    },
];

pub fn catalog() -> &'static [ModelCatalogEntry] {
    &CATALOG
}

/// Instantiate a catalog model after checking its parameter domains.
pub fn builtin_model(name: &str, params: &[f64]) -> Result<Operator, ModelError> {
    let entry = CATALOG.iter().find(|e| e.name == name).ok_or_else(|| ModelError::UnknownModel(name.into()))?;
    if params.len() != entry.params.len() {
        return Err(ModelError::WrongParamCount {
            model: name.into(),
            expected: entry.params.len(),
            got: params.len(),
        });
    }
    for (spec, &value) in entry.params.iter().zip(params) {
        if !spec.admits(value) {
            return Err(ModelError::ParamOutOfRange {
                model: name.into(),
                param: spec.name.into(),
                value,
                domain: spec.domain(),
            });
        }
    }
    Ok((entry.generate)(params))
}

fn pt_dimer(p: &[f64]) -> Operator {
    let (gamma, v) = (p[0], p[1]);
    Operator::from_rows(&[&[c(0.0, gamma), c(v, 0.0)], &[c(v, 0.0), c(0.0, -gamma)]]).expect("finite")
}

fn decay(p: &[f64]) -> Operator {
    Operator::identity(p[1] as usize).scale(c(0.0, -0.5 * p[0]))
}

fn chain(p: &[f64]) -> Operator {
    let (n, j, g) = (p[0] as usize, p[1], p[2]);
    Operator::from_fn(n, |a, b| {
        if a == b {
            c(0.0, if a % 2 == 0 { g } else { -g })
        } else if a.abs_diff(b) == 1 {
            c(j, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
    .expect("finite")
}
