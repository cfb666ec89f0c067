//! Transition amplitudes and their textual literal form.
//!
//! Literals are small arithmetic expressions so that tables can be written
//! with exact-looking values:
//!
//! ```text
//! 1    -1    0.5    2/3    sqrt(2/7)    -sqrt(3/14)    1/sqrt(3)    (0.6,-0.8)
//! ```
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | atom
//! atom  := number | 'sqrt' '(' expr ')' | '(' expr [',' expr] ')'
//! ```
//!
//! A parenthesised pair `(re,im)` denotes a complex number. `sqrt` accepts
//! only non-negative real arguments.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A complex transition weight together with the literal it was read from.
///
/// Equality compares values only; the literal is kept so that documents
/// round-trip byte for byte.
#[derive(Clone, Debug)]
pub struct Amplitude {
    value: Complex64,
    literal: String,
}

impl Amplitude {
    pub fn one() -> Self {
        Amplitude {
            value: Complex64::new(1.0, 0.0),
            literal: "1".to_string(),
        }
    }

    /// Wraps a computed value; the literal is the shortest round-trip decimal form.
    pub fn from_value(value: Complex64) -> Self {
        let literal = if value.im == 0.0 {
            format!("{}", value.re)
        } else {
            format!("({},{})", value.re, value.im)
        };
        Amplitude { value, literal }
    }

    pub fn parse(literal: &str) -> Result<Self> {
        let value = Parser::new(literal).parse_all()?;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::AmplitudeLiteral {
                literal: literal.to_string(),
                reason: "value is not finite".to_string(),
            });
        }
        Ok(Amplitude {
            value,
            literal: literal.trim().to_string(),
        })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn literal(&self) -> &str {
        &self.literal
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.value.re == 0.0 && self.value.im == 0.0
    }

    /// True when the value is exactly `1 + 0i`.
    pub fn is_exact_one(&self) -> bool {
        self.value.re == 1.0 && self.value.im == 0.0
    }
}

impl PartialEq for Amplitude {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal)
    }
}

impl Serialize for Amplitude {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.literal)
    }
}

impl<'de> Deserialize<'de> for Amplitude {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Amplitude::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn fail<T>(&self, reason: impl Into<String>) -> Result<T> {
        Err(Error::AmplitudeLiteral {
            literal: self.src.to_string(),
            reason: reason.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{}` at offset {}", c as char, self.pos))
        }
    }

    fn parse_all(&mut self) -> Result<Complex64> {
        if self.peek().is_none() {
            return self.fail("empty literal");
        }
        let v = self.expr()?;
        if self.peek().is_some() {
            return self.fail(format!("trailing input at offset {}", self.pos));
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<Complex64> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.re == 0.0 && d.im == 0.0 {
                        return self.fail("division by zero");
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Complex64> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Complex64> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let re = self.expr()?;
                if self.peek() == Some(b',') {
                    self.pos += 1;
                    let im = self.expr()?;
                    self.expect(b')')?;
                    if re.im != 0.0 || im.im != 0.0 {
                        return self.fail("pair components must be real");
                    }
                    Ok(Complex64::new(re.re, im.re))
                } else {
                    self.expect(b')')?;
                    Ok(re)
                }
            }
            Some(b's') => {
                if !self.src[self.pos..].starts_with("sqrt") {
                    return self.fail(format!("unexpected token at offset {}", self.pos));
                }
                self.pos += 4;
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                if arg.im != 0.0 || arg.re < 0.0 {
                    return self.fail("sqrt of a negative or complex value");
                }
                Ok(Complex64::new(arg.re.sqrt(), 0.0))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => self.fail(format!("unexpected token at offset {}", self.pos)),
            None => self.fail("unexpected end of literal"),
        }
    }

    fn number(&mut self) -> Result<Complex64> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'e' | b'E') {
            self.pos += 1;
            if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        match self.src[start..self.pos].parse::<f64>() {
            Ok(v) => Ok(Complex64::new(v, 0.0)),
            Err(_) => self.fail(format!("bad number `{}`", &self.src[start..self.pos])),
        }
    }
}
