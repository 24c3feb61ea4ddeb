//! Parser for the element grammar used on the command line:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := rational | var ('^' int)? | '(' expr ')'
//! rational := int ('/' posint)?
//! ```
//!
//! `^` binds tighter than `*`; a unary minus may open a term. Variables come
//! from a caller-supplied allow-list. Errors carry the 1-based byte offset of
//! the offending token.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::ring::Rational;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    /// 1-based byte offset into the source string.
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    allowed: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset0: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: offset0 + 1, message: message.into() })
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

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err(start, "expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    /// Signed machine integer for exponents.
    fn exponent(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat(b'-');
        let n = self.digits()?;
        let n = if negative { -n } else { n };
        i64::try_from(&n).or_else(|_| self.err(start, "exponent out of range"))
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let numer = self.digits()?;
        if self.eat(b'/') {
            self.skip_ws();
            let denom_at = self.pos;
            let denom = self.digits()?;
            if denom.is_zero() {
                return self.err(denom_at, "denominator must be a positive integer");
            }
            Ok(Rational::new(numer, denom))
        } else {
            Ok(Rational::from_integer(numer))
        }
    }

    fn factor(&mut self) -> Result<LaurentPoly, ParseError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => self.err(at, "expected a factor, found end of input"),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    let here = self.pos;
                    return self.err(here, "expected `)`");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(LaurentPoly::from_rational(self.rational()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let name = (c as char).to_string();
                if !self.allowed.contains(&name.as_str()) {
                    return self.err(
                        at,
                        format!("unknown variable `{name}` (allowed: {})", self.allowed.join(", ")),
                    );
                }
                let exponent = if self.eat(b'^') { self.exponent()? } else { 1 };
                Ok(LaurentPoly::monomial(
                    Rational::from_integer(BigInt::from(1)),
                    &[(&name, exponent)],
                ))
            }
            Some(c) => self.err(at, format!("unexpected character `{}`", c as char)),
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = if self.eat(b'-') { self.term()?.neg() } else { self.term()? };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }
}

/// Parse `src` over the given variable allow-list.
pub fn parse_expr(src: &str, allowed: &[&str]) -> Result<LaurentPoly, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, allowed };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(ParseError { offset: 1, message: "empty expression".into() });
    }
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ParseError {
            offset: p.pos + 1,
            message: format!("unexpected trailing input `{}`", &src[p.pos..]),
        });
    }
    Ok(poly)
}

/// Variables accepted by the K_*K command surface.
pub const KK_VARS: &[&str] = &["u", "v"];
/// Full variable set the grammar knows about.
pub const ALL_VARS: &[&str] = &["u", "v", "t", "s", "w"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, rat};

    #[test]
    fn parses_fractional_bivariate_elements() {
        let p = parse_expr("1/2*v^2 - 1/2*u*v", KK_VARS).unwrap();
        let expected = &LaurentPoly::monomial(rat(1, 2), &[("v", 2)])
            - &LaurentPoly::monomial(rat(1, 2), &[("u", 1), ("v", 1)]);
        assert_eq!(p, expected);
        // Round-trip through Display.
        assert_eq!(parse_expr(&p.to_string(), KK_VARS).unwrap(), p);
    }

    #[test]
    fn precedence_caret_over_star() {
        // 2*u^2 is 2(u^2), not (2u)^2.
        let p = parse_expr("2*u^2", KK_VARS).unwrap();
        assert_eq!(p, LaurentPoly::monomial(int(2), &[("u", 2)]));
    }

    #[test]
    fn unary_minus_and_parens() {
        let p = parse_expr("-u*v + u*(v - u)", KK_VARS).unwrap();
        let expected = LaurentPoly::var("u").mul(&LaurentPoly::var("u")).neg();
        assert_eq!(p, expected);
        // A bare leading minus binds the whole first term: -u*v = -(u*v).
        let q = parse_expr("-2*u", KK_VARS).unwrap();
        assert_eq!(q, LaurentPoly::monomial(int(-2), &[("u", 1)]));
    }

    #[test]
    fn negative_exponents() {
        let p = parse_expr("u^-1*v", KK_VARS).unwrap();
        assert_eq!(p, LaurentPoly::monomial(int(1), &[("u", -1), ("v", 1)]));
    }

    #[test]
    fn errors_carry_one_based_offsets() {
        let e = parse_expr("u^", KK_VARS).unwrap_err();
        assert_eq!(e.offset, 3);
        let e = parse_expr("w", KK_VARS).unwrap_err();
        assert_eq!(e.offset, 1);
        assert!(e.message.contains("unknown variable `w`"));
        let e = parse_expr("1/0", KK_VARS).unwrap_err();
        assert_eq!(e.offset, 3);
        let e = parse_expr("(u", KK_VARS).unwrap_err();
        assert_eq!(e.offset, 3);
        let e = parse_expr("u + ", KK_VARS).unwrap_err();
        assert_eq!(e.offset, 5);
        let e = parse_expr("u v", KK_VARS).unwrap_err();
        assert_eq!(e.offset, 3);
        let e = parse_expr("", KK_VARS).unwrap_err();
        assert_eq!(e.offset, 1);
    }

    #[test]
    fn whitespace_is_free() {
        assert_eq!(
            parse_expr("  1/2 * v ^ 2 ", KK_VARS).unwrap(),
            LaurentPoly::monomial(rat(1, 2), &[("v", 2)])
        );
    }
}
