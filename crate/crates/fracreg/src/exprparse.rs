//! Parser for coefficient expressions such as `"(1 + t^2) * sin(x)"`.
//!
//! Grammar (usual precedence, `^` binds tighter than unary minus and is right
//! associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 't' | 'pi' | 'delta' | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp' | 'sqrt' | 'gamma'
//! ```
//!
//! Exponents and `gamma` arguments must reduce to constants.

use fracreg_core::specialfn::gamma;
use fracreg_core::Expr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("unexpected character '{ch}' at offset {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unknown identifier '{name}' at offset {pos}")]
    UnknownIdent { name: String, pos: usize },
    #[error("expected {expected} at offset {pos}")]
    Expected { expected: &'static str, pos: usize },
    #[error("{what} must be a constant (offset {pos})")]
    NotConstant { what: &'static str, pos: usize },
    #[error("'delta' is not defined in this context (offset {pos})")]
    NoDelta { pos: usize },
    #[error("gamma({arg}) is undefined")]
    Gamma { arg: f64 },
}

/// Parses `src`; `delta`, when given, is substituted for the identifier `delta`.
pub fn parse_expr(src: &str, delta: Option<f64>) -> Result<Expr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, delta };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(ParseError::UnexpectedChar { ch: p.src[p.pos] as char, pos: p.pos });
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    delta: Option<f64>,
}

impl Parser<'_> {
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

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs + self.term()?;
            } else if self.eat(b'-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs * self.unary()?;
            } else if self.eat(b'/') {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let pos = self.pos;
            let exponent = self.unary()?;
            let e = exponent.as_const().ok_or(ParseError::NotConstant { what: "exponent", pos })?;
            return Ok(base.powf(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(ParseError::Expected { expected: "')'", pos: self.pos });
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[pos..self.pos]).unwrap_or_default();
                match name {
                    "x" => Ok(Expr::x()),
                    "t" => Ok(Expr::t()),
                    "pi" => Ok(Expr::constant(core::f64::consts::PI)),
                    "delta" => self.delta.map(Expr::constant).ok_or(ParseError::NoDelta { pos }),
                    "sin" | "cos" | "exp" | "sqrt" | "gamma" => {
                        if !self.eat(b'(') {
                            return Err(ParseError::Expected { expected: "'('", pos: self.pos });
                        }
                        let arg_pos = self.pos;
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(ParseError::Expected { expected: "')'", pos: self.pos });
                        }
                        match name {
                            "sin" => Ok(arg.sin()),
                            "cos" => Ok(arg.cos()),
                            "exp" => Ok(arg.exp()),
                            "sqrt" => Ok(arg.powf(0.5)),
                            _ => {
                                let c = arg.as_const().ok_or(ParseError::NotConstant { what: "gamma argument", pos: arg_pos })?;
                                gamma(c).map(Expr::constant).map_err(|_| ParseError::Gamma { arg: c })
                            }
                        }
                    }
                    _ => Err(ParseError::UnknownIdent { name: name.to_string(), pos }),
                }
            }
            Some(c) => Err(ParseError::UnexpectedChar { ch: c as char, pos }),
            None => Err(ParseError::Expected { expected: "an operand", pos }),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        text.parse::<f64>()
            .map(Expr::constant)
            .map_err(|_| ParseError::Expected { expected: "a number", pos: start })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, x: f64, t: f64) -> f64 {
        parse_expr(src, Some(0.5)).unwrap().eval(x, t)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(eval("2 ^ 3 ^ 2", 0.0, 0.0), 512.0);
        assert_eq!(eval("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(eval("(1 - 2) - 3", 0.0, 0.0), -4.0);
        assert_eq!(eval("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(eval("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(eval("1.5e2 + .5", 0.0, 0.0), 150.5);
    }

    #[test]
    fn variables_functions_constants() {
        let v = eval("(1 + t^2) * sin(x)", 0.3, 2.0);
        assert!((v - 5.0 * 0.3f64.sin()).abs() < 1e-15);
        assert!((eval("2 * t^(2 - delta) / gamma(3 - delta)", 0.0, 4.0) - 2.0 * 8.0 / gamma(2.5).unwrap()).abs() < 1e-13);
        assert!((eval("sqrt(x) + exp(-t) + cos(pi)", 4.0, 0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_expr("y + 1", None), Err(ParseError::UnknownIdent { name: "y".into(), pos: 0 }));
        assert!(matches!(parse_expr("x ^ t", None), Err(ParseError::NotConstant { .. })));
        assert!(matches!(parse_expr("gamma(x)", None), Err(ParseError::NotConstant { .. })));
        assert!(matches!(parse_expr("delta", None), Err(ParseError::NoDelta { pos: 0 })));
        assert!(matches!(parse_expr("sin(x", None), Err(ParseError::Expected { .. })));
        assert!(matches!(parse_expr("1 +", None), Err(ParseError::Expected { .. })));
        assert!(matches!(parse_expr("1 $ 2", None), Err(ParseError::UnexpectedChar { ch: '$', pos: 2 })));
        assert!(matches!(parse_expr("gamma(0)", None), Err(ParseError::Gamma { .. })));
    }
}
