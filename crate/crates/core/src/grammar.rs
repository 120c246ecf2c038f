//! Textual form of invariants: `<tau_1(1) tau_1(2)^2>_2`.
//!
//! ```text
//! invariant := "<" insertion* ">" "_" DEGREE
//! insertion := "tau_" INT "(" INT ")" ("^" INT)?
//! ```
//! Whitespace may appear between tokens. `^0` contributes nothing.

use std::fmt::Write as _;

use thiserror::Error;

use crate::invariant::{Codim, Insertion, Invariant};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.text[self.pos..].starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str, what: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.eat(lit) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn int(&mut self, what: &str) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            return self.err(format!("{what} must be non-negative"));
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(format!("expected {what}"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| ParseError { position: start, message: format!("{what} out of range") })
    }
}

/// Parses an invariant expression into canonical form.
pub fn parse_invariant(text: &str) -> Result<Invariant, ParseError> {
    let mut cur = Cursor { text, pos: 0 };
    cur.expect("<", "'<'")?;
    let mut insertions = Vec::new();
    loop {
        cur.skip_ws();
        if cur.eat(">") {
            break;
        }
        if !cur.eat("tau_") {
            return cur.err("expected 'tau_' or '>'");
        }
        let psi = cur.int("psi power")?;
        cur.expect("(", "'('")?;
        let codim_pos = {
            cur.skip_ws();
            cur.pos
        };
        let codim = cur.int("codimension")?;
        let codim = Codim::from_value(codim)
            .ok_or(ParseError { position: codim_pos, message: format!("codimension {codim} is not 0, 1 or 2") })?;
        cur.expect(")", "')'")?;
        cur.skip_ws();
        let repeat = if cur.eat("^") { cur.int("exponent")? } else { 1 };
        insertions.extend(std::iter::repeat_n(Insertion::new(psi, codim), repeat as usize));
    }
    cur.expect("_", "'_' before the degree")?;
    let degree = cur.int("degree")?;
    cur.skip_ws();
    if cur.pos != text.len() {
        return cur.err("trailing input");
    }
    Ok(Invariant::new(degree, insertions))
}

/// Canonical text: equal insertions grouped with an exponent, in canonical order.
pub fn format_invariant(inv: &Invariant) -> String {
    let mut out = String::from("<");
    let ins = inv.insertions();
    let mut i = 0;
    while i < ins.len() {
        let mut j = i;
        while j < ins.len() && ins[j] == ins[i] {
            j += 1;
        }
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}", ins[i]);
        if j - i > 1 {
            let _ = write!(out, "^{}", j - i);
        }
        i = j;
    }
    let _ = write!(out, ">_{}", inv.degree());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grouped_insertions() {
        let inv = parse_invariant("<tau_1(1) tau_1(2)^2>_2").unwrap();
        assert_eq!(inv.degree(), 2);
        assert_eq!(inv.insertions(), &[Insertion::point(1), Insertion::point(1), Insertion::line(1)]);
        let five = parse_invariant("<tau_0(2)^5>_2").unwrap();
        assert_eq!(five.insertions(), &[Insertion::point(0); 5]);
    }

    #[test]
    fn formats_canonically() {
        let inv = Invariant::new(2, [Insertion::line(1), Insertion::point(1), Insertion::point(1)]);
        assert_eq!(format_invariant(&inv), "<tau_1(2)^2 tau_1(1)>_2");
        assert_eq!(format_invariant(&Invariant::new(0, [])), "<>_0");
        assert_eq!(parse_invariant("<>_0").unwrap(), Invariant::new(0, []));
    }

    #[test]
    fn exponent_zero_contributes_nothing() {
        let inv = parse_invariant("< tau_0(2)^0 tau_0(2) tau_0(2) >_1").unwrap();
        assert_eq!(inv.len(), 2);
    }

    #[test]
    fn reports_positions() {
        let e = parse_invariant("<tau_1(1)>_x").unwrap_err();
        assert_eq!(e.position, 11);
        assert!(e.message.contains("degree"));
        let neg = parse_invariant("<tau_1(1)>_-2").unwrap_err();
        assert!(neg.message.contains("non-negative"));
        let exp = parse_invariant("<tau_1(1)^>_2").unwrap_err();
        assert!(exp.message.contains("exponent"));
        assert!(parse_invariant("<tau_1(3)>_2").is_err());
        assert!(parse_invariant("<tau_1(1)>_2 junk").is_err());
    }
}
