//! Text syntax for fronts.
//!
//! ```text
//! expr  := sum ('|' sum)*
//! sum   := atom ('+' atom)*
//! atom  := 'deg' | 'unif:' n | 'schreier' | 'nonsmooth'
//!        | 'size:' ordinal '@' n
//!        | 'tail(' expr ';' n (',' n)* ')'
//!        | 'restr(' expr ';' n ')'
//!        | '(' expr ')'
//! ```
//!
//! `A + B` is `A ⊕ B` and `A | B` is `A ⊔ B`. Base fronts live on `ℕ`;
//! `size:α@m` lives on `[m, ∞)`.

use thiserror::Error;

use crate::ctx::SeqCtx;
use crate::finite_set::FiniteSet;
use crate::front::{
    make_alpha_size, make_degenerate, make_non_smooth_example, make_schreier, make_uniform, oplus, restrict, sqcup,
    tail, BaseStream, Front, FrontError,
};
use crate::parse::{parse_ordinal, ParseError};

/// Failures while reading a front expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontExprError {
    /// Malformed text.
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax {
        /// Byte offset.
        pos: usize,
        /// Description.
        msg: String,
    },
    /// An embedded ordinal failed to parse.
    #[error("in ordinal: {0}")]
    Ordinal(#[from] ParseError),
    /// The described front cannot be built.
    #[error(transparent)]
    Front(#[from] FrontError),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    ctx: &'a SeqCtx,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FrontExprError> {
        Err(FrontExprError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), FrontExprError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected {tok:?}"))
        }
    }

    fn number(&mut self) -> Result<u64, FrontExprError> {
        self.skip_ws();
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return self.err("expected a number");
        }
        let n = self.rest()[..len].parse().or_else(|_| self.err("number out of range"))?;
        self.pos += len;
        Ok(n)
    }

    fn expr(&mut self) -> Result<Front, FrontExprError> {
        let mut acc = self.sum()?;
        while self.eat("|") {
            let rhs = self.sum()?;
            acc = sqcup(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn sum(&mut self) -> Result<Front, FrontExprError> {
        let mut acc = self.atom()?;
        while self.eat("+") {
            let rhs = self.atom()?;
            acc = oplus(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Front, FrontExprError> {
        if self.eat("(") {
            let f = self.expr()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("deg") {
            return Ok(make_degenerate());
        }
        if self.eat("unif:") {
            let n = self.number()?;
            return Ok(make_uniform(n, BaseStream::AllFrom(0)));
        }
        if self.eat("schreier") {
            return Ok(make_schreier(BaseStream::AllFrom(0)));
        }
        if self.eat("nonsmooth") {
            return Ok(make_non_smooth_example());
        }
        if self.eat("size:") {
            let start = self.pos;
            let Some(at) = self.rest().find('@') else {
                return self.err("expected '@' after the ordinal");
            };
            let text = &self.src[start..start + at];
            let alpha = parse_ordinal(text, self.ctx).map_err(|e| shift(e, start))?;
            self.pos = start + at + 1;
            let m = self.number()?;
            return Ok(make_alpha_size(&alpha, BaseStream::AllFrom(m), self.ctx)?);
        }
        if self.eat("tail(") {
            let f = self.expr()?;
            self.expect(";")?;
            let mut elems = vec![self.number()?];
            while self.eat(",") {
                elems.push(self.number()?);
            }
            self.expect(")")?;
            let s = match FiniteSet::new(elems) {
                Ok(s) => s,
                Err(e) => return self.err(e.to_string()),
            };
            return Ok(tail(&f, &s)?);
        }
        if self.eat("restr(") {
            let f = self.expr()?;
            self.expect(";")?;
            let m = self.number()?;
            self.expect(")")?;
            return Ok(restrict(&f, BaseStream::AllFrom(m))?);
        }
        self.err("expected a front")
    }
}

fn shift(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Syntax { pos, msg } => ParseError::Syntax { pos: pos + by, msg },
        ParseError::Value { pos, source } => ParseError::Value { pos: pos + by, source },
    }
}

/// Parses a front expression.
pub fn parse_front(text: &str, ctx: &SeqCtx) -> Result<Front, FrontExprError> {
    let mut p = Parser { src: text, pos: 0, ctx };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parses a comma-separated list of front expressions, splitting only at
/// commas outside parentheses.
pub fn parse_front_list(text: &str, ctx: &SeqCtx) -> Result<Vec<Front>, FrontExprError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(parse_front(&text[start..i], ctx)?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(parse_front(&text[start..], ctx)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::Class;
    use crate::parse::ord;

    #[test]
    fn parses_atoms_and_operators() {
        let c = SeqCtx::default();
        let f = parse_front("unif:1 + unif:2", &c).unwrap();
        assert_eq!(f.height().unwrap(), Some(ord("3")));
        let f = parse_front("size:phi(1,0)@2", &c).unwrap();
        assert_eq!(f.height().unwrap(), Some(ord("eps(0)")));
        let f = parse_front("(unif:1 | unif:2)", &c).unwrap();
        assert_eq!(f.classify(&[4, 6]).unwrap(), Class::Size);
        let f = parse_front("tail(unif:3; 1, 2)", &c).unwrap();
        assert_eq!(f.classify(&[5]).unwrap(), Class::Size);
        let f = parse_front("restr(schreier; 3)", &c).unwrap();
        assert!(f.classify(&[1]).is_err());
    }

    #[test]
    fn lists_and_errors() {
        let c = SeqCtx::default();
        let v = parse_front_list("unif:2,tail(unif:3; 1,2),size:phi(1,0)@2", &c).unwrap();
        assert_eq!(v.len(), 3);
        assert!(matches!(parse_front("unif:", &c), Err(FrontExprError::Syntax { pos: 5, .. })));
        assert!(matches!(parse_front("deg deg", &c), Err(FrontExprError::Syntax { .. })));
        assert!(matches!(parse_front("size:w@0", &c), Err(FrontExprError::Front(_))));
        assert!(matches!(parse_front("size:w+@2", &c), Err(FrontExprError::Ordinal(_))));
    }
}
