//! Text syntax for ordinals.
//!
//! ```text
//! ord    := "0" | term ("+" term)*
//! term   := atom ("*" nat)?
//! atom   := nat | "w" | "w^" factor | "phi(" ord "," ord ")" | "G(" idx ")" | "eps(" ord ")"
//! factor := atom | "(" ord ")"
//! idx    := nat | "w"
//! ```
//!
//! Rendering is canonical: terms descend, `*c` is omitted for `c = 1`,
//! exponents are always parenthesized, and `ω` itself prints as `w`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ctx::{SeqCtx, Zeta};
use crate::ordinal::{
    omega_pow, try_add, try_mul_nat, veblen, BaseIdx, Head, OrdError, Ordinal,
};

/// Failure to parse an ordinal expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// Unexpected input at a byte offset.
    #[error("syntax error at position {pos}: {msg}")]
    Syntax {
        /// Byte offset into the input.
        pos: usize,
        /// What was expected.
        msg: String,
    },
    /// Arithmetic or range failure while building the value.
    #[error("at position {pos}: {source}")]
    Value {
        /// Byte offset into the input.
        pos: usize,
        /// The underlying error.
        source: OrdError,
    },
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.terms().iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match &t.head {
                Head::Veb(a, b) if a.is_zero() && b.is_zero() => {
                    // A finite term prints as the bare number.
                    write!(f, "{}", t.coeff)?;
                    continue;
                }
                Head::Veb(a, b) if a.is_zero() => {
                    if b.as_nat() == Some(1) {
                        f.write_str("w")?;
                    } else {
                        write!(f, "w^({b})")?;
                    }
                }
                Head::Veb(a, b) => write!(f, "phi({a},{b})")?,
                Head::Gam(i) => write!(f, "G({i})")?,
            }
            if t.coeff > 1 {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

/// Deserializes from the text syntax, accepting every supported `Γ` index.
impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let text = String::deserialize(de)?;
        parse_ordinal(&text, &SeqCtx::with_zeta(Zeta::OmegaPlusOne)).map_err(serde::de::Error::custom)
    }
}

/// Parses an ordinal, checking every `Γ` index against the context's `ζ`.
pub fn parse_ordinal(text: &str, ctx: &SeqCtx) -> Result<Ordinal, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, ctx };
    let v = p.ord()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(p.err("end of input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a SeqCtx,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: format!("expected {msg}") }
    }

    fn val(&self, source: OrdError) -> ParseError {
        ParseError::Value { pos: self.pos, source }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(&format!("'{s}'")))
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("a natural number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("digits are ASCII")
            .parse()
            .map_err(|_| ParseError::Syntax { pos: start, msg: "number too large".into() })
    }

    fn peek_digit(&mut self) -> bool {
        self.ws();
        self.pos < self.src.len() && self.src[self.pos].is_ascii_digit()
    }

    fn ord(&mut self) -> Result<Ordinal, ParseError> {
        let mut acc = self.term()?;
        while self.eat("+") {
            let t = self.term()?;
            acc = try_add(&acc, &t).map_err(|e| self.val(e))?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, ParseError> {
        let a = self.atom()?;
        if self.eat("*") {
            let c = self.nat()?;
            return try_mul_nat(&a, c).map_err(|e| self.val(e));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Ordinal, ParseError> {
        if self.peek_digit() {
            return Ok(Ordinal::nat(self.nat()?));
        }
        if self.eat("phi(") {
            let a = self.ord()?;
            self.expect(",")?;
            let b = self.ord()?;
            self.expect(")")?;
            return Ok(veblen(&a, &b));
        }
        if self.eat("eps(") {
            let k = self.ord()?;
            self.expect(")")?;
            return Ok(veblen(&Ordinal::one(), &k));
        }
        if self.eat("G(") {
            let idx = if self.eat("w") { BaseIdx::Omega } else { BaseIdx::Fin(self.nat()?) };
            self.expect(")")?;
            return self.ctx.gamma(idx).map_err(|e| self.val(e));
        }
        if self.eat("w^") {
            let e = self.factor()?;
            return Ok(omega_pow(&e));
        }
        if self.eat("w") {
            return Ok(Ordinal::omega());
        }
        Err(self.err("an ordinal atom"))
    }

    fn factor(&mut self) -> Result<Ordinal, ParseError> {
        if self.eat("(") {
            let v = self.ord()?;
            self.expect(")")?;
            return Ok(v);
        }
        self.atom()
    }
}

/// Parses with the default context, panicking on malformed input. Intended for
/// tests and literals.
pub fn ord(text: &str) -> Ordinal {
    parse_ordinal(text, &SeqCtx::default()).unwrap_or_else(|e| panic!("bad ordinal literal {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_and_rendering() {
        assert_eq!(ord("0"), Ordinal::zero());
        assert_eq!(ord("w^(w)").to_string(), "w^(w)");
        assert_eq!(ord("phi(0,phi(1,0))"), ord("phi(1,0)"));
        assert_eq!(ord("w*2+3").to_string(), "w*2+3");
        assert_eq!(ord("w^2").to_string(), "w^(2)");
        assert_eq!(ord("eps(1)"), ord("phi(1,1)"));
        assert_eq!(ord("1+w"), ord("w"));
        assert_eq!(ord("G(3)").to_string(), "G(3)");
        assert_eq!(ord("phi(G(0),0)"), ord("G(0)"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let ctx = SeqCtx::default();
        match parse_ordinal("w+", &ctx) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_ordinal("phi(1 0)", &ctx).is_err());
        assert!(parse_ordinal("w w", &ctx).is_err());
    }

    #[test]
    fn gamma_index_checked_against_zeta() {
        let ctx = SeqCtx::default();
        assert!(matches!(
            parse_ordinal("G(w)", &ctx),
            Err(ParseError::Value { source: OrdError::GammaIndexOutOfRange(..), .. })
        ));
        let fin = SeqCtx::with_zeta(crate::ctx::Zeta::Finite(2));
        assert!(parse_ordinal("G(1)", &fin).is_ok());
        assert!(parse_ordinal("G(2)", &fin).is_err());
    }

    #[test]
    fn coefficient_overflow_is_reported() {
        let ctx = SeqCtx::default();
        let r = parse_ordinal("w*18446744073709551615+w", &ctx);
        assert!(matches!(r, Err(ParseError::Value { source: OrdError::CoeffOverflow, .. })));
    }
}
