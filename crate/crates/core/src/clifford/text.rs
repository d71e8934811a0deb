//! Textual form of multivectors: signed terms on blades, e.g.
//! `1/2*e1e2 - 3*e3e4`.
//!
//! Printing is canonical (blade order, unit coefficients elided, a single
//! space around binary signs) so `print(parse(s)) == s` for any printed `s`,
//! and `parse(print(m)) == m` whenever the coefficient type's own
//! `Display`/`FromStr` pair round-trips (true for `BigRational` and for the
//! shortest-representation `Display` of `f64`).

use std::fmt;


use super::blade::BladeIndex;
use super::multivector::MultiVector;
use crate::error::{Error, Result};
use crate::scalar::Coefficient;

impl<T: Coefficient> fmt::Display for MultiVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (pos, (blade, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            match (pos, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = c.abs();
            if blade.is_scalar() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{blade}")?;
            } else {
                write!(f, "{magnitude}*{blade}")?;
            }
        }
        Ok(())
    }
}

/// Parse the textual form into a rank-`rank` multivector.
pub fn parse_multivector<T: Coefficient>(rank: usize, input: &str) -> Result<MultiVector<T>> {
    let mut parser = Parser { src: input.as_bytes(), pos: 0 };
    let mut out = MultiVector::zero(rank)?;
    parser.skip_ws();
    if parser.at_end() {
        return Err(parser.error("empty input"));
    }
    let mut first = true;
    loop {
        parser.skip_ws();
        if parser.at_end() {
            break;
        }
        let negative = match parser.peek() {
            Some(b'-') => {
                parser.pos += 1;
                true
            }
            Some(b'+') if !first => {
                parser.pos += 1;
                false
            }
            _ if first => false,
            _ => return Err(parser.error("expected '+' or '-' between terms")),
        };
        first = false;
        parser.skip_ws();
        let term = parser.term::<T>(rank)?;
        let term = if negative { -term } else { term };
        out = out.try_add(&term)?;
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse { position: self.pos, message: message.to_string() }
    }

    fn term<T: Coefficient>(&mut self, rank: usize) -> Result<MultiVector<T>> {
        if self.peek() == Some(b'e') {
            let indices = self.blade()?;
            return MultiVector::blade(rank, &indices, T::one());
        }
        let coefficient = self.coefficient::<T>()?;
        self.skip_ws();
        if self.peek() == Some(b'*') {
            self.pos += 1;
            self.skip_ws();
            let indices = self.blade()?;
            MultiVector::blade(rank, &indices, coefficient)
        } else {
            MultiVector::scalar(rank, coefficient)
        }
    }

    /// Reads up to a top-level `*`, `+`, `-` or whitespace; a sign directly
    /// after an exponent marker belongs to the number.
    fn coefficient<T: Coefficient>(&mut self) -> Result<T> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            let exponent_sign = (c == b'-' || c == b'+')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c == b'*' || c.is_ascii_whitespace() || ((c == b'+' || c == b'-') && !exponent_sign) {
                break;
            }
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| self.error("invalid utf-8"))?;
        if text.is_empty() {
            return Err(Error::Parse { position: start, message: "expected a coefficient".into() });
        }
        text.parse::<T>()
            .map_err(|_| Error::Parse { position: start, message: format!("invalid coefficient {text:?}") })
    }

    fn blade(&mut self) -> Result<Vec<usize>> {
        let mut indices = Vec::new();
        while self.peek() == Some(b'e') {
            self.pos += 1;
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected generator index after 'e'"));
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
            indices.push(digits.parse().map_err(|_| self.error("generator index overflow"))?);
        }
        if indices.is_empty() {
            return Err(self.error("expected a blade"));
        }
        Ok(indices)
    }
}

/// Canonical printing of a single blade, exposed for report formatting.
pub fn blade_label(blade: BladeIndex) -> String {
    if blade.is_scalar() {
        "1".into()
    } else {
        blade.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn prints_and_parses_the_documented_example() {
        let s = "1/2*e1e2 - 3*e3e4";
        let mv: MultiVector<BigRational> = parse_multivector(4, s).unwrap();
        assert_eq!(mv.to_string(), s);
    }

    #[test]
    fn canonical_forms() {
        let mv: MultiVector<BigRational> = parse_multivector(5, "e3e4 - 2 - e1e2 + 2*e2e1").unwrap();
        assert_eq!(mv.to_string(), "-2 - 3*e1e2 + e3e4");
        let zero: MultiVector<BigRational> = parse_multivector(3, "e1 - e1").unwrap();
        assert_eq!(zero.to_string(), "0");
        let f: MultiVector<f64> = parse_multivector(3, "-0.25*e1e3 + 1e-3*e2").unwrap();
        assert_eq!(f.to_string(), "0.001*e2 - 0.25*e1e3");
        let big: MultiVector<BigRational> = parse_multivector(12, "e10e11 - 7/3*e1e12").unwrap();
        assert_eq!(big.to_string(), "-7/3*e1e12 + e10e11");
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_multivector::<BigRational>(3, "").is_err());
        assert!(parse_multivector::<BigRational>(3, "2*").is_err());
        assert!(parse_multivector::<BigRational>(3, "e4").is_err());
        assert!(parse_multivector::<BigRational>(3, "e1 e2").is_err());
        assert!(parse_multivector::<BigRational>(3, "x*e1").is_err());
        assert!(parse_multivector::<BigRational>(3, "e").is_err());
    }
}
