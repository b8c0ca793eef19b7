use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func};

/// First grammar violation in an input, located by byte offset.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: expected {}", self.offset, self.expected)
    }
}

/// Parses an expression in `t`. Whitespace is insignificant.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("operator or end of input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &str) -> ParseError {
        ParseError { offset: self.pos, expected: expected.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("`{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.eat(b'^') {
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            _ => Err(self.error("expression")),
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let mut mantissa = self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            mantissa += self.digits();
        }
        if mantissa == 0 {
            return Err(ParseError { offset: start, expected: "digit".into() });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return Err(self.error("exponent digits"));
            }
        }
        // the slice is ASCII digits, '.', 'e' and signs only
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii literal");
        let value: f64 = text.parse().map_err(|_| ParseError { offset: start, expected: "number".into() })?;
        if !value.is_finite() {
            return Err(ParseError { offset: start, expected: "finite number".into() });
        }
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        if name == "t" {
            return Ok(Expr::Var);
        }
        let Some(func) = Func::from_name(name) else {
            return Err(ParseError {
                offset: start,
                expected: "`t` or a function (abs, sqrt, exp, log, sin, cos, min, max)".into(),
            });
        };
        self.expect(b'(')?;
        let mut args = vec![self.expr()?];
        if func.arity() == 2 {
            self.expect(b',')?;
            args.push(self.expr()?);
        }
        self.expect(b')')?;
        Ok(Expr::Call(func, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_at(text: &str) -> usize {
        parse(text).expect_err(text).offset
    }

    #[test]
    fn accepts_examples() {
        assert!(parse("abs(t-0.5)").is_ok());
        let e = parse("min(t, 1-t)^2").unwrap();
        assert!(matches!(e, Expr::Binary(BinOp::Pow, ref base, _) if matches!(**base, Expr::Call(Func::Min, _))));
    }

    #[test]
    fn precedence_and_associativity() {
        let t = || Box::new(Expr::Var);
        let n = |v| Box::new(Expr::Num(v));
        assert_eq!(
            parse("2^3^t").unwrap(),
            Expr::Binary(BinOp::Pow, n(2.0), Box::new(Expr::Binary(BinOp::Pow, n(3.0), t())))
        );
        assert_eq!(
            parse("1-2-t").unwrap(),
            Expr::Binary(BinOp::Sub, Box::new(Expr::Binary(BinOp::Sub, n(1.0), n(2.0))), t())
        );
        assert_eq!(parse("-t^2").unwrap(), Expr::Binary(BinOp::Pow, Box::new(Expr::Neg(t())), n(2.0)));
        assert_eq!(
            parse("1+2*t").unwrap(),
            Expr::Binary(BinOp::Add, n(1.0), Box::new(Expr::Binary(BinOp::Mul, n(2.0), t())))
        );
        assert_eq!(parse("  t  ").unwrap(), Expr::Var);
    }

    #[test]
    fn numbers() {
        assert_eq!(parse("1.5e3").unwrap(), Expr::Num(1500.0));
        assert_eq!(parse(".25").unwrap(), Expr::Num(0.25));
        assert_eq!(parse("2.").unwrap(), Expr::Num(2.0));
        assert_eq!(parse("1E-2").unwrap(), Expr::Num(0.01));
    }

    #[test]
    fn error_offsets() {
        assert_eq!(err_at("2*^t"), 2);
        assert_eq!(err_at(""), 0);
        assert_eq!(err_at("t +"), 3);
        assert_eq!(err_at("(t"), 2);
        assert_eq!(err_at("t)"), 1);
        assert_eq!(err_at("foo(t)"), 0);
        assert_eq!(err_at("x"), 0);
        assert_eq!(err_at("min(t)"), 5);
        assert_eq!(err_at("abs(t, 1)"), 5);
        assert_eq!(err_at("sqrt t"), 5);
        assert_eq!(err_at("1e+"), 3);
        assert_eq!(err_at("t t"), 2);
        assert_eq!(err_at("1e999"), 0);
        assert_eq!(err_at("."), 0);
        assert_eq!(err_at("t(1)"), 1);
        assert_eq!(err_at("2 # 3"), 2);
    }
}
