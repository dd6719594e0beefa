//! Generalized operator brackets.
//!
//! A bracket is the quadratic form `vᵀ·M·v` of an ordered operator pair
//! `v = (top, bottom)` with a 2×2 block matrix `M` whose entries are
//! operators or multiples of the identity. Products are taken in the
//! written order:
//!
//! ```text
//! vᵀ·M·v = top·m00·top + top·m01·bottom + bottom·m10·top + bottom·m11·bottom
//! ```
//!
//! With the symplectic matrix `Ω = (0, 1; −1, 0)` this is the commutator
//! `[top, bottom]`. Replacing `Ω` by an operator-valued matrix gives the
//! non-Hamiltonian brackets built here: `Ω₋₊(H)` reproduces `[χ, H]` from
//! `H₊` alone, `Λ(H)` carries the gain/loss anticommutator of the
//! density-matrix equation, and `Ω_ξ` defines non-Hermitian flow around a
//! Hermitian generator.

use crate::error::{Error, Result};
use crate::operator::{anticommutator, c, check_dims, commutator, hermitian_split, inverse_checked, Operator, C64};

/// One block of a [`BracketMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub enum BlockEntry {
    /// `s·I`, kept symbolic until evaluation.
    Scalar(C64),
    Op(Operator),
}

impl BlockEntry {
    pub const ZERO: BlockEntry = BlockEntry::Scalar(c(0.0, 0.0));

    pub fn is_zero(&self) -> bool {
        matches!(self, BlockEntry::Scalar(s) if *s == c(0.0, 0.0))
    }

    /// Expand to a full operator of the given dimension.
    pub fn to_operator(&self, dim: usize) -> Operator {
        match self {
            BlockEntry::Scalar(s) => Operator::identity(dim).scale(*s),
            BlockEntry::Op(op) => op.clone(),
        }
    }

    /// `left · self · right`
    fn sandwich(&self, left: &Operator, right: &Operator) -> Option<Operator> {
        match self {
            BlockEntry::Scalar(s) if *s == c(0.0, 0.0) => None,
            BlockEntry::Scalar(s) if *s == c(1.0, 0.0) => Some(left * right),
            BlockEntry::Scalar(s) if *s == c(-1.0, 0.0) => Some(-(left * right)),
            BlockEntry::Scalar(s) => Some((left * right).scale(*s)),
            BlockEntry::Op(m) => Some(left * m * right),
        }
    }
}

/// 2×2 block matrix defining a generalized bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketMatrix {
    pub m00: BlockEntry,
    pub m01: BlockEntry,
    pub m10: BlockEntry,
    pub m11: BlockEntry,
    dim: usize,
}

impl BracketMatrix {
    /// General constructor; every operator-valued block must have dimension `dim`.
    pub fn new(dim: usize, m00: BlockEntry, m01: BlockEntry, m10: BlockEntry, m11: BlockEntry) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyOperator);
        }
        for entry in [&m00, &m01, &m10, &m11] {
            if let BlockEntry::Op(op) = entry {
                if op.dim() != dim {
                    return Err(Error::DimMismatch { left: dim, right: op.dim() });
                }
            }
        }
        Ok(BracketMatrix { m00, m01, m10, m11, dim })
    }

    fn off_diagonal(dim: usize, m01: BlockEntry, m10: BlockEntry) -> Self {
        BracketMatrix { m00: BlockEntry::ZERO, m01, m10, m11: BlockEntry::ZERO, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest entrywise difference between corresponding expanded blocks.
    pub fn max_abs_diff(&self, other: &BracketMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        [(&self.m00, &other.m00), (&self.m01, &other.m01), (&self.m10, &other.m10), (&self.m11, &other.m11)]
            .iter()
            .map(|(a, b)| a.to_operator(self.dim).max_abs_diff(&b.to_operator(self.dim)))
            .fold(0.0, f64::max)
    }
}

/// Ordered operator pair `(top, bottom)`: the observable or state slot and
/// the Hamiltonian slot.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPair {
    pub top: Operator,
    pub bottom: Operator,
}

impl OperatorPair {
    pub fn new(top: Operator, bottom: Operator) -> Result<Self> {
        check_dims(&top, &bottom)?;
        Ok(OperatorPair { top, bottom })
    }

    pub fn dim(&self) -> usize {
        self.top.dim()
    }
}

/// The symplectic matrix `Ω = (0, 1; −1, 0)`.
pub fn make_omega(dim: usize) -> BracketMatrix {
    assert!(dim >= 1);
    BracketMatrix::off_diagonal(dim, BlockEntry::Scalar(c(1.0, 0.0)), BlockEntry::Scalar(c(-1.0, 0.0)))
}

fn invert_hermitian_part(h_plus: &Operator, cond_cap: f64) -> Result<Operator> {
    inverse_checked(h_plus, cond_cap).map_err(|e| match e {
        Error::Singular => Error::SingularHermitianPart,
        other => other,
    })
}

/// `Ω₋₊(H)` with blocks `m01 = 1 + H₋(H₊)⁻¹` and `m10 = −1 − (H₊)⁻¹H₋`.
pub fn make_omega_minus_plus(h: &Operator, cond_cap: f64) -> Result<BracketMatrix> {
    let split = hermitian_split(h)?;
    let inv = invert_hermitian_part(&split.h_plus, cond_cap)?;
    let m01 = (&split.h_minus * &inv).shift(c(1.0, 0.0));
    let m10 = -(&inv * &split.h_minus).shift(c(1.0, 0.0));
    Ok(BracketMatrix::off_diagonal(h.dim(), BlockEntry::Op(m01), BlockEntry::Op(m10)))
}

/// `Λ(H)` with blocks `m01 = 1 + iΓ(H₊)⁻¹` and `m10 = −1 + i(H₊)⁻¹Γ`.
///
/// `eval_bracket(Λ(H), (ρ, H₊)) = [ρ, H₊] + i[Γ, ρ]₊`. Note that the density
/// flow uses `Λ(H†)`, see [`lambda_density_rhs`].
pub fn make_lambda(h: &Operator, cond_cap: f64) -> Result<BracketMatrix> {
    let split = hermitian_split(h)?;
    let inv = invert_hermitian_part(&split.h_plus, cond_cap)?;
    let i = c(0.0, 1.0);
    let m01 = (&split.gamma * &inv).scale(i).shift(c(1.0, 0.0));
    let m10 = (&inv * &split.gamma).scale(i).shift(c(-1.0, 0.0));
    Ok(BracketMatrix::off_diagonal(h.dim(), BlockEntry::Op(m01), BlockEntry::Op(m10)))
}

/// `Ω_ξ` with blocks `m01 = ξ` and `m10 = −ξᵀ` (plain transpose).
pub fn make_omega_xi(xi: &Operator) -> Result<BracketMatrix> {
    if !xi.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    Ok(BracketMatrix::off_diagonal(xi.dim(), BlockEntry::Op(xi.clone()), BlockEntry::Op(-xi.transpose())))
}

/// The operator-valued quadratic form `vᵀ·M·v`.
pub fn eval_bracket(m: &BracketMatrix, v: &OperatorPair) -> Result<Operator> {
    if m.dim != v.dim() {
        return Err(Error::DimMismatch { left: m.dim, right: v.dim() });
    }
    let (top, bottom) = (&v.top, &v.bottom);
    let terms = [
        m.m00.sandwich(top, top),
        m.m01.sandwich(top, bottom),
        m.m10.sandwich(bottom, top),
        m.m11.sandwich(bottom, bottom),
    ];
    Ok(terms.into_iter().flatten().fold(Operator::zeros(m.dim), |acc, t| acc + t))
}

/// `[a, b]_M`, shorthand for evaluating `M` on the pair `(a, b)`.
pub fn bracket(m: &BracketMatrix, a: &Operator, b: &Operator) -> Result<Operator> {
    eval_bracket(m, &OperatorPair::new(a.clone(), b.clone())?)
}

/// Outcome of checking `[χ, H] = [χ, H₊]_{Ω₋₊}` for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingResidual {
    /// `‖[χ,H] − eval(Ω₋₊(H), (χ, H₊))‖_F`
    pub residual: f64,
    /// `‖χ‖_F·‖H‖_F`
    pub scale: f64,
    pub passed: bool,
}

impl MappingResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual
        } else {
            self.residual / self.scale
        }
    }
}

pub fn verify_mapping_identity(h: &Operator, chi: &Operator, tol: f64, cond_cap: f64) -> Result<MappingResidual> {
    check_dims(h, chi)?;
    let omega = make_omega_minus_plus(h, cond_cap)?;
    let split = hermitian_split(h)?;
    let lhs = commutator(chi, h)?;
    let rhs = bracket(&omega, chi, &split.h_plus)?;
    let residual = lhs.distance(&rhs);
    let scale = chi.frobenius_norm() * h.frobenius_norm();
    Ok(MappingResidual { residual, scale, passed: residual <= tol * scale })
}

/// `[ρ, H₊] + i[Γ, ρ]₊`, the closed form of the `Λ(H)` bracket.
pub fn lambda_closed_form(rho: &Operator, h: &Operator) -> Result<Operator> {
    check_dims(rho, h)?;
    let split = hermitian_split(h)?;
    Ok(commutator(rho, &split.h_plus)? + anticommutator(&split.gamma, rho)?.scale(c(0.0, 1.0)))
}

/// `dρ/dt` through the `Λ` bracket: `−iħ dρ/dt = eval(Λ(H†), (ρ, H₊))`.
///
/// `H†` shares `H₊` with `H` and flips the sign of `Γ`. With that sign the
/// bracket equals `−iħ` times `−(i/ħ)[H₊,ρ] + (1/ħ)[Γ,ρ]₊`; with `Λ(H)`
/// itself no scalar prefactor reproduces both terms.
pub fn lambda_density_rhs(rho: &Operator, h: &Operator, hbar: f64, cond_cap: f64) -> Result<Operator> {
    check_dims(rho, h)?;
    let split = hermitian_split(h)?;
    let lambda = make_lambda(&h.adjoint(), cond_cap)?;
    Ok(bracket(&lambda, rho, &split.h_plus)?.scale(c(0.0, 1.0 / hbar)))
}
