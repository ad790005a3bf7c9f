use super::{Expr, Func, Var, VarKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = self.pos;
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = &self.src[start..end];
            let value: f64 = text.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("number `{text}` is not finite"),
                });
            }
            self.pos = end;
            return Ok((Tok::Num(value), start));
        }
        if c.is_ascii_alphabetic() {
            let mut end = self.pos;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident(self.src[start..end].to_string()), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(Error::Syntax {
            offset: start,
            message: format!("unexpected character `{ch}`"),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<()> {
        let (t, at) = self.lexer.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.tok == want {
            self.bump()
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        let found = match &self.tok {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            other => format!("{other:?}"),
        };
        Error::Syntax {
            offset: self.at,
            message: format!("expected {what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let at = self.at;
            let exp = self.exponent()?;
            if !exp.is_constant() {
                return Err(Error::Syntax {
                    offset: at,
                    message: "exponent must be a constant".into(),
                });
            }
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exp = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Func(func, Box::new(arg)));
                }
                self.variable(&name, at).map(Expr::Var)
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }

    fn variable(&self, name: &str, at: usize) -> Result<Var> {
        let unknown = || Error::UnknownIdentifier {
            offset: at,
            name: name.to_string(),
        };
        let (kind, digits) = match name.as_bytes().first() {
            Some(b'x') => (VarKind::X, &name[1..]),
            Some(b'y') => (VarKind::Y, &name[1..]),
            _ => return Err(unknown()),
        };
        if digits.is_empty()
            || !digits.bytes().all(|b| b.is_ascii_digit())
            || digits.starts_with('0')
        {
            return Err(unknown());
        }
        let index: usize = digits.parse().map_err(|_| unknown())?;
        if index > self.dim {
            return Err(Error::VariableOutOfRange {
                offset: at,
                name: name.to_string(),
                dim: self.dim,
            });
        }
        Ok(Var {
            kind,
            index: index - 1,
        })
    }
}

/// Parse `source` as an expression over `x1..xn, y1..yn` with `n = dim`.
pub fn parse_expr(source: &str, dim: usize) -> Result<Expr> {
    if source.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        lexer: Lexer {
            src: source,
            pos: 0,
        },
        tok: Tok::End,
        at: 0,
        dim,
    };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn sum_of_squares() {
        let e = parse_expr("y1^2 + y2^2", 2).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                b(Expr::Pow(b(Expr::y(0)), b(Expr::Num(2.0)))),
                b(Expr::Pow(b(Expr::y(1)), b(Expr::Num(2.0))))
            )
        );
    }

    #[test]
    fn multiplication_binds_tighter() {
        let e = parse_expr("y1 + y2 * y3", 3).unwrap();
        assert_eq!(
            e,
            Expr::Add(b(Expr::y(0)), b(Expr::Mul(b(Expr::y(1)), b(Expr::y(2)))))
        );
    }

    #[test]
    fn unbalanced_call_reports_offset() {
        match parse_expr("sqrt(", 2) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unary_minus_below_power() {
        let e = parse_expr("-x1^2", 1).unwrap();
        assert_eq!(e, Expr::Neg(b(Expr::Pow(b(Expr::x(0)), b(Expr::Num(2.0))))));
    }

    #[test]
    fn subtraction_is_left_associative() {
        let e = parse_expr("y1 - y2 - y3", 3).unwrap();
        assert_eq!(
            e,
            Expr::Sub(b(Expr::Sub(b(Expr::y(0)), b(Expr::y(1)))), b(Expr::y(2)))
        );
    }

    #[test]
    fn identifier_errors() {
        assert!(matches!(
            parse_expr("z1 + 1", 2),
            Err(Error::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(
            parse_expr("y1 + y3", 2),
            Err(Error::VariableOutOfRange {
                offset: 5,
                dim: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_expr("foo(y1)", 2),
            Err(Error::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_expr("x0", 2),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn exponent_must_be_constant() {
        assert!(matches!(
            parse_expr("y1^y2", 2),
            Err(Error::Syntax { offset: 3, .. })
        ));
        assert!(parse_expr("y1^(1/2)", 2).is_ok());
        assert!(parse_expr("y1^-2", 2).is_ok());
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(matches!(
            parse_expr("y1 y2", 2),
            Err(Error::Syntax { offset: 3, .. })
        ));
        assert!(matches!(parse_expr("   ", 2), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_expr("(y1", 2),
            Err(Error::Syntax { offset: 3, .. })
        ));
    }
}
