//! Text grammar: terms `c*z^i*w^j` joined by `+`/`-`, complex literals
//! `(a+bi)`, whitespace ignored, exponents non-negative integers.

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::exact::qi;
use num_complex::Complex64;

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            _src: src,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: 1,
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let digits = |c: &mut Cursor| {
            let s = c.pos;
            while c.pos < c.chars.len() && c.chars[c.pos].is_ascii_digit() {
                c.pos += 1;
            }
            c.pos > s
        };
        let int_part = digits(self);
        let mut frac_part = false;
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            frac_part = digits(self);
        }
        if !int_part && !frac_part {
            self.pos = start;
            return self.err("expected a number");
        }
        if matches!(self.chars.get(self.pos), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+') | Some('-')) {
                self.pos += 1;
            }
            if !digits(self) {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err(format!("malformed number '{text}'"))
            }
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if !self.eat('^') {
            return Ok(1);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a non-negative integer exponent");
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<i64>().or_else(|_| {
            self.pos = start;
            self.err("exponent too large")
        })
    }

    /// `(a+bi)`, `(a)`, `(bi)`, `(a-bi)`; the opening parenthesis is consumed here.
    fn complex_literal(&mut self) -> Result<Complex64> {
        if !self.eat('(') {
            return self.err("expected '('");
        }
        let mut value = Complex64::new(0.0, 0.0);
        let mut first = true;
        loop {
            let sign = if self.eat('-') {
                -1.0
            } else if self.eat('+') || first {
                1.0
            } else {
                break;
            };
            first = false;
            let magnitude = if self.peek() == Some('i') {
                None
            } else {
                Some(self.number()?)
            };
            if self.eat('i') {
                value.im += sign * magnitude.unwrap_or(1.0);
            } else if let Some(m) = magnitude {
                value.re += sign * m;
            } else {
                return self.err("expected a number");
            }
        }
        if !self.eat(')') {
            return self.err("expected ')' to close complex literal");
        }
        Ok(value)
    }

    fn term(&mut self, sign: f64) -> Result<Monomial> {
        let mut coeff = Complex64::new(sign, 0.0);
        let (mut i, mut j) = (0i64, 0i64);
        loop {
            match self.peek() {
                Some('z') => {
                    self.pos += 1;
                    i += self.exponent()?;
                }
                Some('w') => {
                    self.pos += 1;
                    j += self.exponent()?;
                }
                Some('i') => {
                    self.pos += 1;
                    coeff *= Complex64::new(0.0, 1.0);
                }
                Some('(') => coeff *= self.complex_literal()?,
                Some(c) if c.is_ascii_digit() || c == '.' => {
                    let v = self.number()?;
                    if self.peek() == Some('i') {
                        self.pos += 1;
                        coeff *= Complex64::new(0.0, v);
                    } else {
                        coeff *= v;
                    }
                }
                Some(c) => return self.err(format!("unexpected character '{c}'")),
                None => return self.err("unexpected end of input"),
            }
            if !self.eat('*') {
                break;
            }
        }
        Ok(Monomial::new(qi(i as i128), qi(j as i128), coeff))
    }
}

pub fn parse_polynomial(src: &str) -> Result<Polynomial> {
    let mut cur = Cursor::new(src);
    if cur.at_end() {
        return cur.err("empty polynomial");
    }
    let mut terms = Vec::new();
    let mut sign = if cur.eat('-') {
        -1.0
    } else {
        cur.eat('+');
        1.0
    };
    loop {
        terms.push(cur.term(sign)?);
        if cur.at_end() {
            break;
        }
        sign = if cur.eat('+') {
            1.0
        } else if cur.eat('-') {
            -1.0
        } else {
            let c = cur.peek().unwrap_or(' ');
            return cur.err(format!("expected '+' or '-', found '{c}'"));
        };
    }
    Ok(Polynomial::new(terms))
}

/// A single complex number: `3`, `-2.5e3`, `(1+2i)`, `2i`.
pub fn parse_complex(src: &str) -> Result<Complex64> {
    let mut cur = Cursor::new(src);
    let sign = if cur.eat('-') {
        -1.0
    } else {
        cur.eat('+');
        1.0
    };
    let v = match cur.peek() {
        Some('(') => cur.complex_literal()?,
        Some('i') => {
            cur.pos += 1;
            Complex64::new(0.0, 1.0)
        }
        _ => {
            let v = cur.number()?;
            if cur.eat('i') {
                Complex64::new(0.0, v)
            } else {
                Complex64::new(v, 0.0)
            }
        }
    };
    if !cur.at_end() {
        return cur.err("trailing characters after number");
    }
    Ok(v * sign)
}
