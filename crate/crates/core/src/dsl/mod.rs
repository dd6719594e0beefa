//! Operator expression language used by scenario files.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | atom | call | '(' expr ')'
//! number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits] ['i']
//! atom    := sigma_x | sigma_y | sigma_z
//! call    := id(n) | ket(n, k) | proj(n, k) | kron(a, b, ...) | adj(a)
//!          | pt_dimer(gamma, v) | decay(gamma, n) | chain(n, j, g)
//! ```
//!
//! Literals are real (`0.5`) or imaginary (`0.5i`); a general complex
//! scalar is written as a sum, `(1 + 0.5i)`. There is no bare `i`.
//! A product with exactly one scalar side parses as a scale node.

mod eval;
mod lexer;
mod models;
mod parser;

use std::fmt;

use thiserror::Error;

pub use eval::{evaluate, evaluate_state, evaluate_value, Value};
pub use models::{builtin_model, catalog, ModelCatalogEntry, ModelError, ParamSpec};
pub use parser::parse_expression;

use crate::operator::{Operator, C64};

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// 1-based character column of `start` in `src`.
    pub fn column(&self, src: &str) -> usize {
        src.get(..self.start).map_or(self.start, |s| s.chars().count()) + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn name(self) -> &'static str {
        match self {
            Pauli::X => "sigma_x",
            Pauli::Y => "sigma_y",
            Pauli::Z => "sigma_z",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "sigma_x" => Some(Pauli::X),
            "sigma_y" => Some(Pauli::Y),
            "sigma_z" => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn operator(self) -> Operator {
        match self {
            Pauli::X => Operator::sigma_x(),
            Pauli::Y => Operator::sigma_y(),
            Pauli::Z => Operator::sigma_z(),
        }
    }
}

/// Parameterized builtins taking scalar arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Identity,
    Ket,
    Proj,
    PtDimer,
    Decay,
    Chain,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Identity => "id",
            Builtin::Ket => "ket",
            Builtin::Proj => "proj",
            Builtin::PtDimer => "pt_dimer",
            Builtin::Decay => "decay",
            Builtin::Chain => "chain",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        [Builtin::Identity, Builtin::Ket, Builtin::Proj, Builtin::PtDimer, Builtin::Decay, Builtin::Chain]
            .into_iter()
            .find(|b| b.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Identity => 1,
            Builtin::Ket | Builtin::Proj | Builtin::PtDimer | Builtin::Decay => 2,
            Builtin::Chain => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// Purely real or purely imaginary literal.
    Scalar(C64),
    Atom(Pauli),
    Call(Builtin, Vec<Expr>),
    Kron(Vec<Expr>),
    Adjoint(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Product of two operators, or of two scalars.
    Mul(Box<Expr>, Box<Expr>),
    /// Scalar factor times an operator-valued operand.
    Scale {
        factor: Box<Expr>,
        operand: Box<Expr>,
    },
    Div(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    /// Equality ignoring spans.
    pub fn structurally_eq(&self, other: &Expr) -> bool {
        use ExprKind::*;
        let all = |a: &[Expr], b: &[Expr]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.structurally_eq(y));
        match (&self.kind, &other.kind) {
            (Scalar(a), Scalar(b)) => a == b,
            (Atom(a), Atom(b)) => a == b,
            (Call(f, a), Call(g, b)) => f == g && all(a, b),
            (Kron(a), Kron(b)) => all(a, b),
            (Adjoint(a), Adjoint(b)) | (Neg(a), Neg(b)) => a.structurally_eq(b),
            (Add(a1, a2), Add(b1, b2))
            | (Sub(a1, a2), Sub(b1, b2))
            | (Mul(a1, a2), Mul(b1, b2))
            | (Div(a1, a2), Div(b1, b2))
            | (Scale { factor: a1, operand: a2 }, Scale { factor: b1, operand: b2 }) => {
                a1.structurally_eq(b1) && a2.structurally_eq(b2)
            }
            _ => false,
        }
    }

    /// Whether the node denotes a complex number rather than an operator.
    pub fn is_scalar(&self) -> bool {
        match &self.kind {
            ExprKind::Scalar(_) => true,
            ExprKind::Neg(a) => a.is_scalar(),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) | ExprKind::Div(a, b) => {
                a.is_scalar() && b.is_scalar()
            }
            _ => false,
        }
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // Debug output is the shortest representation that parses back exactly.
    write!(f, "{x:?}")
}

/// Canonical text form; every compound node is parenthesized so that
/// reparsing yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, items: &[Expr]| -> fmt::Result {
            for (k, e) in items.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            Ok(())
        };
        match &self.kind {
            ExprKind::Scalar(z) if z.im == 0.0 => write_number(f, z.re),
            ExprKind::Scalar(z) => {
                write_number(f, z.im)?;
                write!(f, "i")
            }
            ExprKind::Atom(p) => write!(f, "{}", p.name()),
            ExprKind::Call(b, args) => {
                write!(f, "{}(", b.name())?;
                list(f, args)?;
                write!(f, ")")
            }
            ExprKind::Kron(args) => {
                write!(f, "kron(")?;
                list(f, args)?;
                write!(f, ")")
            }
            ExprKind::Adjoint(a) => write!(f, "adj({a})"),
            ExprKind::Add(a, b) => write!(f, "({a} + {b})"),
            ExprKind::Sub(a, b) => write!(f, "({a} - {b})"),
            ExprKind::Neg(a) => write!(f, "(-{a})"),
            ExprKind::Mul(a, b) => write!(f, "({a} * {b})"),
            ExprKind::Scale { factor, operand } => write!(f, "({factor} * {operand})"),
            ExprKind::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslErrorKind {
    #[error("syntax error: expected {}, found {found}", .expected.join(" or "))]
    Syntax { expected: Vec<String>, found: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: String, got: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("type error: {0}")]
    Type(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// An expression error with the span of the offending node.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} (at {}..{})", .span.start, .span.end)]
pub struct DslError {
    pub kind: DslErrorKind,
    pub span: Span,
}

impl DslError {
    /// Human-readable message with a 1-based column.
    pub fn render(&self, src: &str) -> String {
        format!("column {}: {}", self.span.column(src), self.kind)
    }
}

/// Parse and evaluate an operator expression.
pub fn parse_operator(text: &str) -> Result<Operator, DslError> {
    evaluate(&parse_expression(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_reparses_to_same_tree() {
        for src in ["sigma_z + 0.5i*sigma_x", "kron(sigma_z, id(2))", "-(2 - 1e-5i)*adj(sigma_y)/3"] {
            let ast = parse_expression(src).unwrap();
            let printed = ast.to_string();
            assert!(parse_expression(&printed).unwrap().structurally_eq(&ast), "{src} -> {printed}");
        }
    }

    #[test]
    fn column_counts_characters() {
        assert_eq!(Span::new(0, 1).column("abc"), 1);
        assert_eq!(Span::new(3, 4).column("αbc"), 3);
    }
}
