use super::{DslError, DslErrorKind, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token {
    /// Unsigned literal; `imaginary` when suffixed with `i`.
    Number {
        value: f64,
        imaginary: bool,
    },
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    End,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Number { .. } => "number".into(),
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::End => "end of input".into(),
        }
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Token, Span)>, DslError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        let start = pos;
        let single = match b {
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            b',' => Some(Token::Comma),
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            _ => None,
        };
        if let Some(tok) = single {
            pos += 1;
            out.push((tok, Span::new(start, pos)));
            continue;
        }
        if b.is_ascii_whitespace() {
            pos += 1;
        } else if b.is_ascii_digit() || b == b'.' {
            pos = scan_number(bytes, pos);
            let text = &src[start..pos];
            let value: f64 = text.parse().map_err(|_| DslError {
                kind: DslErrorKind::Syntax { expected: vec!["number".into()], found: format!("`{text}`") },
                span: Span::new(start, pos),
            })?;
            if !value.is_finite() {
                return Err(DslError {
                    kind: DslErrorKind::Syntax { expected: vec!["finite number".into()], found: format!("`{text}`") },
                    span: Span::new(start, pos),
                });
            }
            let imaginary = pos < bytes.len() && bytes[pos] == b'i' && !continues_ident(bytes, pos + 1);
            if imaginary {
                pos += 1;
            }
            out.push((Token::Number { value, imaginary }, Span::new(start, pos)));
        } else if b.is_ascii_alphabetic() || b == b'_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push((Token::Ident(src[start..pos].to_string()), Span::new(start, pos)));
        } else {
            let ch = src[start..].chars().next().expect("in bounds");
            return Err(DslError {
                kind: DslErrorKind::Syntax { expected: vec!["expression".into()], found: format!("`{ch}`") },
                span: Span::new(start, start + ch.len_utf8()),
            });
        }
    }
    out.push((Token::End, Span::new(src.len(), src.len())));
    Ok(out)
}

fn continues_ident(bytes: &[u8], pos: usize) -> bool {
    pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
}

// digits [. digits] [(e|E) [+-] digits]
fn scan_number(bytes: &[u8], mut pos: usize) -> usize {
    let digits = |mut p: usize| {
        while p < bytes.len() && bytes[p].is_ascii_digit() {
            p += 1;
        }
        p
    };
    pos = digits(pos);
    if pos < bytes.len() && bytes[pos] == b'.' {
        pos = digits(pos + 1);
    }
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        let mut p = pos + 1;
        if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
            p += 1;
        }
        if p < bytes.len() && bytes[p].is_ascii_digit() {
            pos = digits(p);
        }
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Token> {
        tokenize(src).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn complex_literals() {
        assert_eq!(
            kinds("0.5i*sigma_x"),
            vec![
                Token::Number { value: 0.5, imaginary: true },
                Token::Star,
                Token::Ident("sigma_x".into()),
                Token::End
            ]
        );
        assert_eq!(kinds("1e-5i")[0], Token::Number { value: 1e-5, imaginary: true });
        assert_eq!(kinds("2e3")[0], Token::Number { value: 2000.0, imaginary: false });
    }

    #[test]
    fn suffix_i_must_end_the_literal() {
        // `2id` is the number 2 followed by the identifier `id`.
        assert_eq!(kinds("2id")[..2], [Token::Number { value: 2.0, imaginary: false }, Token::Ident("id".into())]);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("sigma_x $ 1").unwrap_err();
        assert_eq!(err.span, Span::new(8, 9));
    }
}
