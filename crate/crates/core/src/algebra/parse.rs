//! Text grammar for polynomials, vector fields and one-forms.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*        // '*' optional after a number
//! factor := atom ['^' integer] ['/' integer]
//! atom   := integer | ident | basis | '(' expr ')' | '-' atom
//! basis  := 'd/d' var        (vector fields)
//!         | 'd' var          (one-forms)
//! ```
//!
//! Every offset reported in errors is a byte offset into the input.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::poly::Poly;
use super::ring::RingRef;
use super::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Scalar,
    VectorField,
    OneForm,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Num(text[start..i].parse().unwrap()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(Poly),
    Linear(Vec<Poly>),
}

struct Parser<'a> {
    ring: &'a RingRef,
    basis: Basis,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        offset,
        message: message.into(),
    })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn dim(&self) -> usize {
        self.ring.nvars()
    }

    fn expr(&mut self) -> Result<Value> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
            }
            Some(Tok::Minus) => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = neg(acc);
        }
        loop {
            let op_at = self.offset();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.add(acc, t, op_at)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.add(acc, neg(t), op_at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut last_was_number = matches!(self.peek(), Some(Tok::Num(_)));
        let mut acc = self.factor()?;
        loop {
            let at = self.offset();
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    last_was_number = matches!(self.peek(), Some(Tok::Num(_)));
                    let f = self.factor()?;
                    acc = self.mul(acc, f, at)?;
                }
                Some(Tok::Ident(_)) | Some(Tok::LParen) if last_was_number => {
                    last_was_number = false;
                    let f = self.factor()?;
                    acc = self.mul(acc, f, at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Value> {
        let at = self.offset();
        let mut base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let e_at = self.offset();
            let e = match self.bump() {
                Some((Tok::Num(n), _)) => n
                    .to_u32()
                    .filter(|&e| e <= 64)
                    .ok_or_else(|| Error::Parse {
                        offset: e_at,
                        message: "exponent too large".into(),
                    })?,
                _ => return err(e_at, "expected a non-negative integer exponent after `^`"),
            };
            base = match base {
                Value::Scalar(p) => Value::Scalar(p.pow(e)),
                Value::Linear(_) => return err(at, "cannot raise a basis element to a power"),
            };
        }
        while let Some(Tok::Slash) = self.peek() {
            self.bump();
            let d_at = self.offset();
            let d = match self.bump() {
                Some((Tok::Num(n), _)) if !n.is_zero() => n,
                Some((Tok::Num(_), _)) => return err(d_at, "division by zero"),
                _ => return err(d_at, "expected an integer denominator after `/`"),
            };
            let inv = Rational::new(BigInt::from(1), d);
            base = scale(base, &inv);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value> {
        let at = self.offset();
        match self.bump() {
            Some((Tok::Num(n), _)) => Ok(Value::Scalar(Poly::constant(self.ring, Rational::from_integer(n)))),
            Some((Tok::Minus, _)) => Ok(neg(self.atom()?)),
            Some((Tok::LParen, _)) => {
                let v = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(v),
                    _ => err(at, "unbalanced parenthesis"),
                }
            }
            Some((Tok::Ident(name), _)) => self.ident(name, at),
            Some((t, off)) => err(off, format!("unexpected token {}", describe(&t))),
            None => err(at, "unexpected end of input"),
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Value> {
        if self.basis == Basis::VectorField && name == "d" {
            if let (Some(Tok::Slash), Some(Tok::Ident(next))) =
                (self.toks.get(self.pos).map(|t| &t.0), self.toks.get(self.pos + 1).map(|t| &t.0))
            {
                if let Some(var) = next.strip_prefix('d') {
                    if let Some(i) = self.ring.index_of(var) {
                        self.pos += 2;
                        return Ok(self.basis_vector(i));
                    }
                    return err(self.toks[self.pos + 1].1, format!("unknown coordinate `{var}` in d/d{var}"));
                }
            }
        }
        if let Some(i) = self.ring.index_of(&name) {
            return Ok(Value::Scalar(Poly::var(self.ring, i)));
        }
        if self.basis == Basis::OneForm {
            if let Some(var) = name.strip_prefix('d') {
                if let Some(i) = self.ring.index_of(var) {
                    return Ok(self.basis_vector(i));
                }
            }
        }
        err(at, format!("unknown identifier `{name}`"))
    }

    fn basis_vector(&self, i: usize) -> Value {
        let mut v = vec![Poly::zero(self.ring); self.dim()];
        v[i] = Poly::one(self.ring);
        Value::Linear(v)
    }

    fn add(&self, a: Value, b: Value, at: usize) -> Result<Value> {
        match (a, b) {
            (Value::Scalar(p), Value::Scalar(q)) => Ok(Value::Scalar(&p + &q)),
            (Value::Linear(u), Value::Linear(v)) => Ok(Value::Linear(u.iter().zip(&v).map(|(a, b)| a + b).collect())),
            (Value::Scalar(p), l @ Value::Linear(_)) | (l @ Value::Linear(_), Value::Scalar(p)) if p.is_zero() => Ok(l),
            _ => err(at, "cannot add a function to a basis combination"),
        }
    }

    fn mul(&self, a: Value, b: Value, at: usize) -> Result<Value> {
        match (a, b) {
            (Value::Scalar(p), Value::Scalar(q)) => Ok(Value::Scalar(&p * &q)),
            (Value::Scalar(p), Value::Linear(v)) | (Value::Linear(v), Value::Scalar(p)) => {
                Ok(Value::Linear(v.iter().map(|c| &p * c).collect()))
            }
            _ => err(at, "product of two basis elements"),
        }
    }
}

fn neg(v: Value) -> Value {
    match v {
        Value::Scalar(p) => Value::Scalar(-p),
        Value::Linear(v) => Value::Linear(v.into_iter().map(|c| -c).collect()),
    }
}

fn scale(v: Value, c: &Rational) -> Value {
    match v {
        Value::Scalar(p) => Value::Scalar(p.scale(c)),
        Value::Linear(v) => Value::Linear(v.iter().map(|p| p.scale(c)).collect()),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("`{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

fn run(ring: &RingRef, text: &str, basis: Basis) -> Result<Value> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return err(0, "empty expression");
    }
    let mut p = Parser {
        ring,
        basis,
        toks,
        pos: 0,
        end: text.len(),
    };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        let (t, off) = &p.toks[p.pos];
        return err(*off, format!("unexpected token {}", describe(t)));
    }
    Ok(v)
}

pub fn parse_poly(ring: &RingRef, text: &str) -> Result<Poly> {
    match run(ring, text, Basis::Scalar)? {
        Value::Scalar(p) => Ok(p),
        Value::Linear(_) => err(0, "expected a polynomial"),
    }
}

/// Parse `poly*d/dvar + ...` (vector fields) or `poly*dvar + ...` (forms)
/// into one coefficient per ring variable.
pub fn parse_linear(ring: &RingRef, text: &str, basis: Basis) -> Result<Vec<Poly>> {
    match run(ring, text, basis)? {
        Value::Linear(v) => Ok(v),
        Value::Scalar(p) if p.is_zero() => Ok(vec![Poly::zero(ring); ring.nvars()]),
        Value::Scalar(_) => err(0, "expected a combination of basis elements"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio, Ring};

    fn ring() -> RingRef {
        Ring::new(&["x", "y", "z"]).unwrap()
    }

    #[test]
    fn optional_star_after_coefficient() {
        let r = ring();
        assert_eq!(parse_poly(&r, "3/2x^2*y").unwrap(), parse_poly(&r, "3/2*x^2*y").unwrap());
        assert_eq!(parse_poly(&r, "2(x+1)").unwrap(), parse_poly(&r, "2*x + 2").unwrap());
    }

    #[test]
    fn double_caret_is_located() {
        let r = ring();
        match parse_poly(&r, "x^^2") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        let r = ring();
        match parse_poly(&r, "x + w") {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, 4);
                assert!(message.contains("w"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vector_fields_and_forms() {
        let r = ring();
        let v = parse_linear(&r, "x*d/dy - y*d/dx + d/dz", Basis::VectorField).unwrap();
        assert_eq!(v[0], parse_poly(&r, "-y").unwrap());
        assert_eq!(v[1], parse_poly(&r, "x").unwrap());
        assert_eq!(v[2], Poly::one(&r));
        let f = parse_linear(&r, "x*dy - 1/2 dz", Basis::OneForm).unwrap();
        assert_eq!(f[1], Poly::var(&r, 0));
        assert_eq!(f[2], Poly::constant(&r, ratio(-1, 2)));
        assert!(parse_linear(&r, "0", Basis::OneForm).unwrap().iter().all(|p| p.is_zero()));
        assert!(parse_linear(&r, "dx*dy", Basis::OneForm).is_err());
        assert!(parse_linear(&r, "x + dy", Basis::OneForm).is_err());
    }

    #[test]
    fn constants() {
        let r = ring();
        assert_eq!(parse_poly(&r, "-(3)").unwrap().constant_value(), Some(rat(-3)));
        assert!(parse_poly(&r, "1/0").is_err());
        assert!(parse_poly(&r, "").is_err());
    }
}
