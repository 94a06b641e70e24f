//! Frequency expressions in the mode invariants `H1 .. Hm`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' integer)?
//! primary := number | 'H' index | ('cosh' | 'sinh') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Indices are 1-based. Numbers accept the usual decimal and exponent forms.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at byte {position} of `{source_text}`")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
    pub source_text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Invariant `H_{i+1}`.
    Invariant(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Cosh(Box<Expr>),
    Sinh(Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut p = Parser { src: text, bytes: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Largest invariant index referenced, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Invariant(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Cosh(a) | Expr::Sinh(a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.arity().max(b.arity()),
        }
    }

    /// Evaluates with `h[i] = H_{i+1}`. Indices beyond `h` read as NaN.
    pub fn eval<T: Real>(&self, h: &[T]) -> T {
        match self {
            Expr::Const(c) => T::lit(*c),
            Expr::Invariant(i) => h.get(*i).copied().unwrap_or_else(T::nan),
            Expr::Neg(a) => -a.eval(h),
            Expr::Add(a, b) => a.eval(h) + b.eval(h),
            Expr::Sub(a, b) => a.eval(h) - b.eval(h),
            Expr::Mul(a, b) => a.eval(h) * b.eval(h),
            Expr::Div(a, b) => a.eval(h) / b.eval(h),
            Expr::Pow(a, k) => a.eval(h).powi(*k as i32),
            Expr::Cosh(a) => a.eval(h).cosh(),
            Expr::Sinh(a) => a.eval(h).sinh(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { position: self.pos, message: message.to_string(), source_text: self.src.to_string() }
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
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat(b'^') {
            self.skip_ws();
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected a nonnegative integer exponent"));
            }
            let k = digits.parse::<u32>().map_err(|_| self.error("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(b'H') => {
                self.pos += 1;
                let digits = self.digits();
                match digits.parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(Expr::Invariant(i - 1)),
                    _ => Err(self.error("expected invariant index H1, H2, ...")),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                let wrap: fn(Box<Expr>) -> Expr = match name {
                    "cosh" => Expr::Cosh,
                    "sinh" => Expr::Sinh,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown function `{name}`")));
                    }
                };
                if !self.eat(b'(') {
                    return Err(self.error("expected `(`"));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(wrap(Box::new(arg)))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let at = |p: usize, s: &Self| s.bytes.get(p).copied();
        while at(self.pos, self).is_some_and(|c| c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        if at(self.pos, self).is_some_and(|c| c == b'e' || c == b'E') {
            let mut p = self.pos + 1;
            if at(p, self).is_some_and(|c| c == b'+' || c == b'-') {
                p += 1;
            }
            if at(p, self).is_some_and(|c| c.is_ascii_digit()) {
                self.pos = p;
                while at(self.pos, self).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        self.src[start..self.pos].parse::<f64>().map(Expr::Const).map_err(|_| ParseError {
            position: start,
            message: "malformed number".into(),
            source_text: self.src.to_string(),
        })
    }
}
