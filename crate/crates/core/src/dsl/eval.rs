use nalgebra::DVector;

use super::models::{builtin_model, MAX_MODEL_DIM};
use super::{Builtin, DslError, DslErrorKind, Expr, ExprKind, ModelError, Span};
use crate::dynamics::StateVector;
use crate::operator::{c, Operator, C64};

/// Result of evaluating a subexpression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(C64),
    Operator(Operator),
    Ket(DVector<C64>),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Operator(_) => "operator",
            Value::Ket(_) => "ket",
        }
    }
}

fn err(kind: DslErrorKind, span: Span) -> DslError {
    DslError { kind, span }
}

fn type_error(msg: String, span: Span) -> DslError {
    err(DslErrorKind::Type(msg), span)
}

fn dim_check(left: usize, right: usize, span: Span) -> Result<(), DslError> {
    if left == right {
        Ok(())
    } else {
        Err(err(DslErrorKind::DimMismatch { left, right }, span))
    }
}

/// Evaluate to an operator; scalar or ket results are type errors.
pub fn evaluate(ast: &Expr) -> Result<Operator, DslError> {
    match evaluate_value(ast)? {
        Value::Operator(op) => Ok(op),
        other => Err(type_error(format!("expected an operator, found a {}", other.kind()), ast.span)),
    }
}

/// Evaluate to a state vector.
pub fn evaluate_state(ast: &Expr) -> Result<StateVector, DslError> {
    match evaluate_value(ast)? {
        Value::Ket(v) => StateVector::new(v).map_err(|e| type_error(e.to_string(), ast.span)),
        other => Err(type_error(format!("expected a ket, found a {}", other.kind()), ast.span)),
    }
}

pub fn evaluate_value(ast: &Expr) -> Result<Value, DslError> {
    let span = ast.span;
    match &ast.kind {
        ExprKind::Scalar(z) => Ok(Value::Scalar(*z)),
        ExprKind::Atom(p) => Ok(Value::Operator(p.operator())),
        ExprKind::Call(b, args) => call(*b, args, span),
        ExprKind::Kron(args) => {
            let mut values = args.iter().map(evaluate_value);
            let mut acc = values.next().expect("kron has at least two arguments")?;
            for (v, arg) in values.zip(&args[1..]) {
                acc = match (acc, v?) {
                    (Value::Operator(a), Value::Operator(b)) => Value::Operator(a.kron(&b)),
                    (Value::Ket(a), Value::Ket(b)) => Value::Ket(a.kronecker(&b)),
                    (a, b) => {
                        return Err(type_error(format!("cannot take kron of {} and {}", a.kind(), b.kind()), arg.span))
                    }
                };
            }
            Ok(acc)
        }
        ExprKind::Adjoint(a) => match evaluate_value(a)? {
            Value::Operator(op) => Ok(Value::Operator(op.adjoint())),
            Value::Scalar(z) => Ok(Value::Scalar(z.conj())),
            Value::Ket(_) => Err(type_error("adjoint of a ket is not supported".into(), span)),
        },
        ExprKind::Neg(a) => Ok(match evaluate_value(a)? {
            Value::Scalar(z) => Value::Scalar(-z),
            Value::Operator(op) => Value::Operator(-op),
            Value::Ket(v) => Value::Ket(-v),
        }),
        ExprKind::Add(a, b) => add(evaluate_value(a)?, evaluate_value(b)?, 1.0, span),
        ExprKind::Sub(a, b) => add(evaluate_value(a)?, evaluate_value(b)?, -1.0, span),
        ExprKind::Mul(a, b) => match (evaluate_value(a)?, evaluate_value(b)?) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x * y)),
            (Value::Operator(x), Value::Operator(y)) => {
                dim_check(x.dim(), y.dim(), span)?;
                Ok(Value::Operator(x * y))
            }
            (Value::Operator(x), Value::Ket(v)) => {
                dim_check(x.dim(), v.len(), span)?;
                Ok(Value::Ket(x.apply(&v)))
            }
            (x, y) => Err(type_error(format!("cannot multiply {} by {}", x.kind(), y.kind()), span)),
        },
        ExprKind::Scale { factor, operand } => {
            let Value::Scalar(s) = evaluate_value(factor)? else {
                return Err(type_error("scale factor must be a scalar".into(), factor.span));
            };
            scale(evaluate_value(operand)?, s)
        }
        ExprKind::Div(a, b) => {
            let Value::Scalar(d) = evaluate_value(b)? else {
                return Err(type_error("divisor must be a scalar".into(), b.span));
            };
            if d == c(0.0, 0.0) {
                return Err(type_error("division by zero".into(), b.span));
            }
            scale(evaluate_value(a)?, d.inv())
        }
    }
}

fn scale(v: Value, s: C64) -> Result<Value, DslError> {
    Ok(match v {
        Value::Scalar(z) => Value::Scalar(z * s),
        Value::Operator(op) => Value::Operator(op.scale(s)),
        Value::Ket(k) => Value::Ket(k * s),
    })
}

fn add(a: Value, b: Value, sign: f64, span: Span) -> Result<Value, DslError> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y * sign)),
        (Value::Operator(x), Value::Operator(y)) => {
            dim_check(x.dim(), y.dim(), span)?;
            Ok(Value::Operator(x + y.scale_real(sign)))
        }
        (Value::Ket(x), Value::Ket(y)) => {
            dim_check(x.len(), y.len(), span)?;
            Ok(Value::Ket(x + y * c(sign, 0.0)))
        }
        (x, y) => Err(type_error(format!("cannot add {} and {}", x.kind(), y.kind()), span)),
    }
}

fn real_args(args: &[Expr]) -> Result<Vec<f64>, DslError> {
    args.iter()
        .map(|a| match evaluate_value(a)? {
            Value::Scalar(z) if z.im == 0.0 => Ok(z.re),
            Value::Scalar(_) => Err(type_error("parameter must be real".into(), a.span)),
            other => Err(type_error(format!("parameter must be a scalar, found a {}", other.kind()), a.span)),
        })
        .collect()
}

fn index_arg(name: &str, param: &str, value: f64, lo: usize, hi: usize, span: Span) -> Result<usize, DslError> {
    if value.fract() == 0.0 && value >= lo as f64 && value <= hi as f64 {
        Ok(value as usize)
    } else {
        Err(err(
            DslErrorKind::Model(ModelError::ParamOutOfRange {
                model: name.into(),
                param: param.into(),
                value,
                domain: format!("integers in [{lo}, {hi}]"),
            }),
            span,
        ))
    }
}

fn call(b: Builtin, args: &[Expr], span: Span) -> Result<Value, DslError> {
    let p = real_args(args)?;
    let name = b.name();
    match b {
        Builtin::Identity => {
            let n = index_arg(name, "n", p[0], 1, MAX_MODEL_DIM, args[0].span)?;
            Ok(Value::Operator(Operator::identity(n)))
        }
        Builtin::Ket | Builtin::Proj => {
            let n = index_arg(name, "n", p[0], 1, MAX_MODEL_DIM, args[0].span)?;
            let k = index_arg(name, "k", p[1], 0, n - 1, args[1].span)?;
            Ok(if b == Builtin::Ket {
                let mut v = DVector::zeros(n);
                v[k] = c(1.0, 0.0);
                Value::Ket(v)
            } else {
                Value::Operator(Operator::projector(n, k))
            })
        }
        Builtin::PtDimer | Builtin::Decay | Builtin::Chain => {
            builtin_model(name, &p).map(Value::Operator).map_err(|e| err(DslErrorKind::Model(e), span))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_expression, parse_operator};

    fn eval(src: &str) -> Result<Operator, DslError> {
        parse_operator(src)
    }

    #[test]
    fn entrywise_sum() {
        let h = eval("sigma_z + 0.5i*sigma_x").unwrap();
        let expected = Operator::from_rows(&[&[c(1., 0.), c(0., 0.5)], &[c(0., 0.5), c(-1., 0.)]]).unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn kron_with_identity() {
        let h = eval("kron(sigma_z, id(2))").unwrap();
        assert_eq!(h, Operator::diagonal(&[c(1., 0.), c(1., 0.), c(-1., 0.), c(-1., 0.)]).unwrap());
    }

    #[test]
    fn dimension_mismatch_points_at_node() {
        let src = "sigma_x + id(4)";
        let e = eval(src).unwrap_err();
        assert_eq!(e.kind, DslErrorKind::DimMismatch { left: 2, right: 4 });
        assert_eq!(e.span, Span::new(0, src.len()));
        let e = eval("2*(sigma_x * id(3))").unwrap_err();
        assert_eq!(e.span, Span::new(2, 19));
    }

    #[test]
    fn complex_scalars_and_division() {
        let h = eval("(1 + 2i)*sigma_z/2").unwrap();
        assert_eq!(h.get(0, 0), c(0.5, 1.0));
        assert_eq!(h.get(1, 1), c(-0.5, -1.0));
        assert!(eval("sigma_z/0").is_err());
        assert!(eval("sigma_z/sigma_x").is_err());
    }

    #[test]
    fn adjoint_conjugates() {
        let h = eval("adj(pt_dimer(0.5, 1))").unwrap();
        assert_eq!(h.get(0, 0), c(0.0, -0.5));
    }

    #[test]
    fn type_errors() {
        assert!(matches!(eval("2 + sigma_x").unwrap_err().kind, DslErrorKind::Type(_)));
        assert!(matches!(eval("3i").unwrap_err().kind, DslErrorKind::Type(_)));
        assert!(matches!(eval("ket(2, 0)").unwrap_err().kind, DslErrorKind::Type(_)));
        assert!(matches!(eval("id(2i)").unwrap_err().kind, DslErrorKind::Type(_)));
        assert!(matches!(eval("id(sigma_x)").unwrap_err().kind, DslErrorKind::Type(_)));
    }

    #[test]
    fn builtin_errors_carry_spans() {
        let src = "sigma_z + pt_dimer(-1, 1)";
        let e = eval(src).unwrap_err();
        assert!(matches!(e.kind, DslErrorKind::Model(ModelError::ParamOutOfRange { .. })));
        assert_eq!(e.span.column(src), 11);
        assert!(matches!(eval("proj(2, 2)").unwrap_err().kind, DslErrorKind::Model(_)));
        assert!(matches!(eval("id(0)").unwrap_err().kind, DslErrorKind::Model(_)));
    }

    #[test]
    fn kets() {
        let psi = evaluate_state(&parse_expression("(ket(2, 0) + 1i*ket(2, 1))/2").unwrap()).unwrap();
        assert_eq!(psi.amplitudes().as_slice(), &[c(0.5, 0.0), c(0.0, 0.5)]);
        let psi = evaluate_state(&parse_expression("kron(ket(2, 1), ket(2, 0))").unwrap()).unwrap();
        assert_eq!(psi.amplitudes()[2], c(1.0, 0.0));
        let psi = evaluate_state(&parse_expression("sigma_x*ket(2, 0)").unwrap()).unwrap();
        assert_eq!(psi.amplitudes()[1], c(1.0, 0.0));
        assert!(evaluate_state(&parse_expression("ket(2,0) - ket(2,0)").unwrap()).is_err());
        assert!(evaluate_state(&parse_expression("sigma_x").unwrap()).is_err());
    }
}
