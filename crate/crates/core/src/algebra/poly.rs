use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ring::{Monomial, MonomialOrder, RingRef};
use super::Rational;
use crate::error::{Error, Result};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so the zero polynomial is the empty
/// term map.
#[derive(Clone, Debug)]
pub struct Poly {
    ring: RingRef,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        super::Ring::same(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ring.vars().hash(state);
        self.terms.hash(state);
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn zero(ring: &RingRef) -> Self {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &RingRef) -> Self {
        Poly::constant(ring, Rational::one())
    }

    pub fn constant(ring: &RingRef, c: Rational) -> Self {
        let mut p = Poly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.nvars()), c);
        }
        p
    }

    pub fn int(ring: &RingRef, c: i64) -> Self {
        Poly::constant(ring, rat(c))
    }

    pub fn var(ring: &RingRef, i: usize) -> Self {
        Poly::monomial(ring, Monomial::var(ring.nvars(), i), Rational::one())
    }

    /// The variable called `name`. Panics when the ring has no such variable.
    pub fn named(ring: &RingRef, name: &str) -> Self {
        let i = ring
            .index_of(name)
            .unwrap_or_else(|| panic!("no variable `{name}` in {ring}"));
        Poly::var(ring, i)
    }

    pub fn monomial(ring: &RingRef, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.nvars(), ring.nvars(), "monomial arity");
        let mut p = Poly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(ring: &RingRef, terms: I) -> Self {
        let mut p = Poly::zero(ring);
        for (m, c) in terms {
            assert_eq!(m.nvars(), ring.nvars(), "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn parse(ring: &RingRef, text: &str) -> Result<Self> {
        super::parse::parse_poly(ring, text)
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Constant term value if the polynomial is constant.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn variables_used(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * rat(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.ring.nvars() {
            return Err(Error::ArityMismatch {
                expected: self.ring.nvars(),
                got: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute `images[i]` for variable `i`. The images share one ring,
    /// which becomes the ring of the result.
    pub fn substitute(&self, images: &[Poly], target: &RingRef) -> Result<Poly> {
        if images.len() != self.ring.nvars() {
            return Err(Error::ArityMismatch {
                expected: self.ring.nvars(),
                got: images.len(),
            });
        }
        for im in images {
            super::Ring::check_same(im.ring(), target)?;
        }
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder. A single polynomial is a Gröbner basis of the principal
    /// ideal it generates, so a zero remainder decides divisibility.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(divisor);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Multivariate division by one polynomial under grevlex.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let order = MonomialOrder::GRevLex;
        let (lm, lc) = divisor.leading_term(order).map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut q = Poly::zero(&self.ring);
        let mut r = Poly::zero(&self.ring);
        let mut p = self.clone();
        while let Some((m, c)) = p.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
            if let Some(t) = m.div(&lm) {
                let k = &c / &lc;
                q.add_term(t.clone(), k.clone());
                p = &p - &divisor.mul_monomial(&t, &k);
            } else {
                r.add_term(m.clone(), c);
                p.terms.remove(&m);
            }
        }
        (q, r)
    }

    /// Monomial content: the largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.ring.nvars()),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    /// Move the polynomial into another ring with the same arity and layout.
    pub fn with_ring(&self, ring: &RingRef) -> Poly {
        assert_eq!(ring.nvars(), self.ring.nvars());
        Poly {
            ring: ring.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Re-embed into `ring`, where variable `i` of `self` becomes variable
    /// `map[i]` of `ring`.
    pub fn embed(&self, ring: &RingRef, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.ring.nvars());
        let mut out = Poly::zero(ring);
        for (m, c) in &self.terms {
            let mut e = vec![0; ring.nvars()];
            for (i, &k) in map.iter().enumerate() {
                e[k] += m.0[i];
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Terms sorted by decreasing grevlex order (display order).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| MonomialOrder::GRevLex.cmp(b.0, a.0));
        v
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        assert_rings(self, rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        assert_rings(self, rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        assert_rings(self, rhs);
        let mut out = Poly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &'a Poly) -> Poly {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

fn assert_rings(a: &Poly, b: &Poly) {
    assert!(
        super::Ring::same(&a.ring, &b.ring),
        "polynomial arithmetic across rings {} and {}",
        a.ring,
        b.ring
    );
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn fmt_monomial(vars: &[String], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (v, &e) in vars.iter().zip(&m.0) {
        match e {
            0 => {}
            1 => parts.push(v.clone()),
            _ => parts.push(format!("{v}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = fmt_monomial(self.ring.vars(), m);
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Ring;

    fn ring() -> RingRef {
        Ring::new(&["x", "y", "z"]).unwrap()
    }

    #[test]
    fn display_matches_grammar() {
        let r = ring();
        let p = Poly::parse(&r, "3/2*x^2*y - z + 1").unwrap();
        assert_eq!(p.to_string(), "3/2*x^2*y - z + 1");
        assert_eq!(Poly::zero(&r).to_string(), "0");
        assert_eq!(Poly::parse(&r, "-x + -2").unwrap().to_string(), "-x - 2");
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let r = ring();
        let x = Poly::var(&r, 0);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.num_terms(), 0);
    }

    #[test]
    fn derivative_and_eval() {
        let r = ring();
        let p = Poly::parse(&r, "x^3*y + 2*z").unwrap();
        assert_eq!(p.derivative(0), Poly::parse(&r, "3*x^2*y").unwrap());
        let v = p.eval(&[rat(2), rat(3), ratio(1, 2)]).unwrap();
        assert_eq!(v, rat(25));
        assert!(p.eval(&[rat(1)]).is_err());
    }

    #[test]
    fn exact_division() {
        let r = ring();
        let a = Poly::parse(&r, "x^2 - y^2").unwrap();
        let b = Poly::parse(&r, "x + y").unwrap();
        assert_eq!(a.div_exact(&b), Some(Poly::parse(&r, "x - y").unwrap()));
        let c = Poly::parse(&r, "x^2 + y").unwrap();
        assert_eq!(c.div_exact(&b), None);
    }

    #[test]
    fn substitution_changes_ring() {
        let r = ring();
        let s = Ring::new(&["u", "v"]).unwrap();
        let p = Poly::parse(&r, "x*y + z").unwrap();
        let u = Poly::var(&s, 0);
        let v = Poly::var(&s, 1);
        let q = p.substitute(&[u.clone(), &u * &v, Poly::int(&s, 3)], &s).unwrap();
        assert_eq!(q, Poly::parse(&s, "u^2*v + 3").unwrap());
    }
}
