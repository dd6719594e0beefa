use super::lexer::{tokenize, Token};
use super::{Builtin, DslError, DslErrorKind, Expr, ExprKind, Pauli, Span};
use crate::operator::c;

/// Parse `text` into an expression tree with source spans.
pub fn parse_expression(text: &str) -> Result<Expr, DslError> {
    if text.trim().is_empty() {
        return Err(DslError {
            kind: DslErrorKind::Syntax { expected: vec!["expression".into()], found: "end of input".into() },
            span: Span::new(0, text.len()),
        });
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    parser.expect(&Token::End, "end of input")?;
    Ok(expr)
}

struct Parser {
    tokens: Vec<(Token, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, Span) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> DslError {
        DslError {
            kind: DslErrorKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: self.peek().describe(),
            },
            span: self.span(),
        }
    }

    fn expect(&mut self, tok: &Token, what: &str) -> Result<Span, DslError> {
        if self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            let ctor: fn(Box<Expr>, Box<Expr>) -> ExprKind = match self.peek() {
                Token::Plus => ExprKind::Add,
                Token::Minus => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr { kind: ctor(Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let is_div = match self.peek() {
                Token::Star => false,
                Token::Slash => true,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.join(rhs.span);
            let kind = if is_div {
                ExprKind::Div(Box::new(lhs), Box::new(rhs))
            } else {
                match (lhs.is_scalar(), rhs.is_scalar()) {
                    (true, false) => ExprKind::Scale { factor: Box::new(lhs), operand: Box::new(rhs) },
                    (false, true) => ExprKind::Scale { factor: Box::new(rhs), operand: Box::new(lhs) },
                    _ => ExprKind::Mul(Box::new(lhs), Box::new(rhs)),
                }
            };
            lhs = Expr { kind, span };
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if self.peek() == &Token::Minus {
            let start = self.bump().1;
            let inner = self.unary()?;
            let span = start.join(inner.span);
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        match self.peek().clone() {
            Token::Number { value, imaginary } => {
                let span = self.bump().1;
                let z = if imaginary { c(0.0, value) } else { c(value, 0.0) };
                Ok(Expr { kind: ExprKind::Scalar(z), span })
            }
            Token::LParen => {
                let open = self.bump().1;
                let mut inner = self.expr()?;
                let close = self.expect(&Token::RParen, "`)`")?;
                inner.span = open.join(close);
                Ok(inner)
            }
            Token::Ident(name) => {
                let name_span = self.bump().1;
                self.identifier(&name, name_span)
            }
            _ => Err(self.unexpected(&["number", "identifier", "`(`", "`-`"])),
        }
    }

    fn identifier(&mut self, name: &str, name_span: Span) -> Result<Expr, DslError> {
        if let Some(p) = Pauli::from_name(name) {
            return Ok(Expr { kind: ExprKind::Atom(p), span: name_span });
        }
        let builtin = Builtin::from_name(name);
        if builtin.is_none() && name != "kron" && name != "adj" {
            return Err(DslError { kind: DslErrorKind::UnknownSymbol(name.to_string()), span: name_span });
        }
        self.expect(&Token::LParen, "`(`")?;
        let mut args = vec![self.expr()?];
        while self.peek() == &Token::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        let close = self.expect(&Token::RParen, "`,` or `)`")?;
        let span = name_span.join(close);
        let arity_error = |expected: &str| DslError {
            kind: DslErrorKind::Arity { name: name.to_string(), expected: expected.to_string(), got: args.len() },
            span,
        };
        let kind = match (name, builtin) {
            ("kron", _) if args.len() < 2 => return Err(arity_error("at least 2")),
            ("kron", _) => ExprKind::Kron(args),
            ("adj", _) if args.len() != 1 => return Err(arity_error("1")),
            ("adj", _) => ExprKind::Adjoint(Box::new(args.pop().expect("one argument"))),
            (_, Some(b)) if args.len() != b.arity() => return Err(arity_error(&b.arity().to_string())),
            (_, Some(b)) => ExprKind::Call(b, args),
            (_, None) => unreachable!("checked above"),
        };
        Ok(Expr { kind, span })
    }
}
