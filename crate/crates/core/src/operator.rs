//! Dense complex operators and the arithmetic the bracket algebra is built on.
//!
//! [`Operator`] wraps a square `nalgebra` matrix of `Complex64` entries.
//! Constructors enforce the invariants (square, non-empty, finite); the
//! arithmetic operators are unchecked and cheap.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default cap on the condition number accepted by [`inverse_checked`].
pub const DEFAULT_COND_CAP: f64 = 1e8;

/// Default cap on the Frobenius norm accepted by [`matrix_exponential`].
pub const DEFAULT_EXP_NORM_CAP: f64 = 1e3;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

impl Operator {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyOperator);
        }
        let op = Operator { m };
        if !op.is_finite() {
            return Err(Error::NonFiniteEntries);
        }
        Ok(op)
    }

    /// Build from row slices. Panics on ragged input; meant for literals.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::new(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
    }

    /// Build from real row-major data.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        assert_eq!(data.len(), dim * dim);
        Self::new(DMatrix::from_fn(dim, dim, |i, j| c(data[i * dim + j], 0.0)))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1);
        Operator { m: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        Operator { m: DMatrix::zeros(dim, dim) }
    }

    pub fn sigma_x() -> Self {
        Operator { m: DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]) }
    }

    pub fn sigma_y() -> Self {
        Operator { m: DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]) }
    }

    pub fn sigma_z() -> Self {
        Operator { m: DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]) }
    }

    /// |k⟩⟨k| in dimension `dim`.
    pub fn projector(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = c(1.0, 0.0);
        Operator { m }
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        debug_assert!(m.is_square());
        Operator { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Operator { m: self.m.adjoint() }
    }

    /// Plain transpose in the computational basis (no conjugation).
    pub fn transpose(&self) -> Self {
        Operator { m: self.m.transpose() }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        self.m.column_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        SVD::new(self.m.clone(), false, false).singular_values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Operator { m: &self.m * s }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    /// Add `s` times the identity.
    pub fn shift(&self, s: C64) -> Self {
        let mut m = self.m.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += s;
        }
        Operator { m }
    }

    pub fn kron(&self, other: &Operator) -> Self {
        Operator { m: self.m.kronecker(&other.m) }
    }

    /// Matrix product with a dimension check.
    pub fn try_mul(&self, other: &Operator) -> Result<Self> {
        check_dims(self, other)?;
        Ok(self * other)
    }

    pub fn try_add(&self, other: &Operator) -> Result<Self> {
        check_dims(self, other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Operator) -> Result<Self> {
        check_dims(self, other)?;
        Ok(self - other)
    }

    /// Entrywise maximum absolute difference.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of the difference.
    pub fn distance(&self, other: &Operator) -> f64 {
        (self - other).frobenius_norm()
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.m * v
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator({}x{}) [", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.m[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
                Operator { m: $body(&self.m, &rhs.m) }
            }
        }
        impl $tr<Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                (&self).$method(rhs)
            }
        }
        impl $tr<Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &DMatrix<C64>, b: &DMatrix<C64>| a + b);
binop!(Sub, sub, |a: &DMatrix<C64>, b: &DMatrix<C64>| a - b);
binop!(Mul, mul, |a: &DMatrix<C64>, b: &DMatrix<C64>| a * b);

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { m: -&self.m }
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { m: -self.m }
    }
}

impl Mul<&Operator> for C64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(self)
    }
}

impl Mul<Operator> for C64 {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        rhs.scale(self)
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale_real(self)
    }
}

impl Mul<Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        rhs.scale_real(self)
    }
}

pub(crate) fn check_dims(a: &Operator, b: &Operator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

/// The Hermitian/anti-Hermitian decomposition of a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSplit {
    /// (H + H†)/2
    pub h_plus: Operator,
    /// (H − H†)/2
    pub h_minus: Operator,
    /// −i·h_minus, Hermitian.
    pub gamma: Operator,
}

pub fn hermitian_split(h: &Operator) -> Result<HermitianSplit> {
    if !h.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    let adj = h.adjoint();
    let h_plus = (h + &adj).scale_real(0.5);
    let h_minus = (h - &adj).scale_real(0.5);
    let gamma = h_minus.scale(c(0.0, -1.0));
    Ok(HermitianSplit { h_plus, h_minus, gamma })
}

/// `[a, b] = ab − ba`
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_dims(a, b)?;
    Ok(a * b - b * a)
}

/// `[a, b]₊ = ab + ba`
pub fn anticommutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_dims(a, b)?;
    Ok(a * b + b * a)
}

/// `(‖A − A†‖_F, ‖A + A†‖_F)`
pub fn hermiticity_defect(a: &Operator) -> (f64, f64) {
    let adj = a.adjoint();
    ((a - &adj).frobenius_norm(), (a + &adj).frobenius_norm())
}

/// Hermitian test with a tolerance relative to `‖A‖_F`.
pub fn is_hermitian(a: &Operator, rel_tol: f64) -> bool {
    hermiticity_defect(a).0 <= rel_tol * a.frobenius_norm()
}

/// `e^A` with the default norm cap.
pub fn matrix_exponential(a: &Operator) -> Result<Operator> {
    matrix_exponential_capped(a, DEFAULT_EXP_NORM_CAP)
}

/// `e^A`, refusing inputs with `‖A‖_F > norm_cap`.
///
/// Normal matrices go through the complex Schur form, whose triangular
/// factor is then diagonal and whose basis is unitary. Everything else uses
/// scaling and squaring with the degree-13 Padé approximant.
pub fn matrix_exponential_capped(a: &Operator, norm_cap: f64) -> Result<Operator> {
    if !a.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    let norm = a.frobenius_norm();
    if norm > norm_cap {
        return Err(Error::NormOverflow { norm, cap: norm_cap });
    }
    if norm == 0.0 {
        return Ok(Operator::identity(a.dim()));
    }
    if normality_defect(a) <= 1e-12 * norm * norm {
        if let Some(e) = expm_normal(a) {
            return Ok(e);
        }
    }
    Ok(expm_pade13(a))
}

fn normality_defect(a: &Operator) -> f64 {
    let adj = a.adjoint();
    (a * &adj - &adj * a).frobenius_norm()
}

fn expm_normal(a: &Operator) -> Option<Operator> {
    let n = a.dim();
    let schur = Schur::try_new(a.m.clone(), f64::EPSILON, 100 * n.max(10))?;
    let (q, t) = schur.unpack();
    let exp_diag = DVector::from_fn(n, |i, _| t[(i, i)].exp());
    let scaled = DMatrix::from_fn(n, n, |i, j| q[(i, j)] * exp_diag[j]);
    let m = scaled * q.adjoint();
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(Operator { m })
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn expm_pade13(a: &Operator) -> Operator {
    let n = a.dim();
    let norm1 = a.one_norm();
    let squarings = if norm1 > THETA13 { (norm1 / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale_real(0.5f64.powi(squarings)).m;
    let b = |k: usize| c(PADE13[k], 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9)) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular after scaling");
    for _ in 0..squarings {
        r = &r * &r;
    }
    Operator { m: r }
}

/// Singular values in descending order.
pub fn singular_values(a: &Operator) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(a.m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(a: &Operator) -> f64 {
    let s = singular_values(a);
    let (max, min) = (s[0], s[s.len() - 1]);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse guarded by a condition-number cap.
pub fn inverse_checked(a: &Operator, cond_cap: f64) -> Result<Operator> {
    if !a.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    let s = singular_values(a);
    let (max, min) = (s[0], s[s.len() - 1]);
    if max == 0.0 || min <= max * f64::EPSILON * a.dim() as f64 {
        return Err(Error::Singular);
    }
    let cond = max / min;
    if cond > cond_cap {
        return Err(Error::IllConditioned { cond, cap: cond_cap });
    }
    let inv = a.m.clone().lu().try_inverse().ok_or(Error::Singular)?;
    Ok(Operator { m: inv })
}

/// Eigenvalues sorted by real part, then imaginary part.
///
/// Dimensions up to 2 use the closed-form roots of the characteristic
/// polynomial, which resolve a 2×2 Jordan block exactly; larger matrices
/// go through the complex Schur form.
pub fn eigenvalues(a: &Operator) -> Result<Vec<C64>> {
    if !a.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    let mut values = match a.dim() {
        1 => vec![a.m[(0, 0)]],
        2 => {
            let (p, q, r, s) = (a.m[(0, 0)], a.m[(0, 1)], a.m[(1, 0)], a.m[(1, 1)]);
            let mean = (p + s) * 0.5;
            let half_diff = (p - s) * 0.5;
            let root = (half_diff * half_diff + q * r).sqrt();
            vec![mean + root, mean - root]
        }
        n => {
            let schur = Schur::try_new(a.m.clone(), f64::EPSILON, 1000 * n)
                .ok_or_else(|| Error::InvalidParameter("Schur iteration did not converge".into()))?;
            let (_, t) = schur.unpack();
            (0..n).map(|i| t[(i, i)]).collect()
        }
    };
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(values)
}

/// Ascending eigenvalues of the Hermitian part `(A + A†)/2`.
pub fn hermitian_eigenvalues(a: &Operator) -> Vec<f64> {
    let herm = (a + &a.adjoint()).scale_real(0.5);
    let mut values: Vec<f64> = SymmetricEigen::new(herm.m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}
