use std::fmt;

use super::poly::Poly;
use super::ring::RingRef;
use super::Rational;
use crate::error::{Error, Result};

/// Quotient `num / den` of polynomials with `den != 0`. Equality is
/// decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Precondition("zero denominator".into()));
        }
        super::Ring::check_same(num.ring(), den.ring())?;
        Ok(RationalFunction { num, den }.normalized())
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.ring());
        RationalFunction { num: p, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn ring(&self) -> &RingRef {
        self.num.ring()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial this function equals, if any.
    pub fn as_poly(&self) -> Option<Poly> {
        self.num.div_exact(&self.den)
    }

    fn normalized(self) -> Self {
        if let Some(q) = self.num.div_exact(&self.den) {
            return RationalFunction::from_poly(q);
        }
        let common = self.num.monomial_content().gcd(&self.den.monomial_content());
        if common.is_one() {
            return self;
        }
        let d = Poly::monomial(self.num.ring(), common, Rational::from_integer(1.into()));
        RationalFunction {
            num: self.num.div_exact(&d).expect("monomial content divides"),
            den: self.den.div_exact(&d).expect("monomial content divides"),
        }
    }

    pub fn add(&self, o: &RationalFunction) -> RationalFunction {
        if self.den == o.den {
            return RationalFunction {
                num: &self.num + &o.num,
                den: self.den.clone(),
            }
            .normalized();
        }
        RationalFunction {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
        .normalized()
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RationalFunction) -> RationalFunction {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
        .normalized()
    }

    pub fn recip(&self) -> Result<RationalFunction> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self, var: usize) -> RationalFunction {
        let num = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        RationalFunction {
            num,
            den: &self.den * &self.den,
        }
        .normalized()
    }

    /// Value at `point`, or `None` where the denominator vanishes.
    pub fn eval(&self, point: &[Rational]) -> Result<Option<Rational>> {
        let d = self.den.eval(point)?;
        if num_traits::Zero::is_zero(&d) {
            return Ok(None);
        }
        Ok(Some(self.num.eval(point)? / d))
    }

    pub fn equals(&self, o: &RationalFunction) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }

    /// `p(images)` for a polynomial `p` in as many variables as images.
    pub fn substitute_into(p: &Poly, images: &[RationalFunction], target: &RingRef) -> Result<RationalFunction> {
        if images.len() != p.ring().nvars() {
            return Err(Error::ArityMismatch {
                expected: p.ring().nvars(),
                got: images.len(),
            });
        }
        let mut out = RationalFunction::from_poly(Poly::zero(target));
        for (m, c) in p.terms() {
            let mut t = RationalFunction::from_poly(Poly::constant(target, c.clone()));
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&images[i]);
                }
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Determinant of a square matrix of rational functions, by cofactor
    /// expansion along the first row.
    pub fn det(m: &[Vec<RationalFunction>], ring: &RingRef) -> RationalFunction {
        let n = m.len();
        if n == 0 {
            return RationalFunction::from_poly(Poly::one(ring));
        }
        let mut acc = RationalFunction::from_poly(Poly::zero(ring));
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<RationalFunction>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let term = m[0][j].mul(&RationalFunction::det(&minor, ring));
            acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, o: &Self) -> bool {
        self.equals(o)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den == Poly::one(self.den.ring()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Ring};

    #[test]
    fn arithmetic_and_equality() {
        let r = Ring::new(&["u", "v"]).unwrap();
        let p = |s: &str| Poly::parse(&r, s).unwrap();
        let inv_v = RationalFunction::new(p("1"), p("v")).unwrap();
        let uv = RationalFunction::from_poly(p("u*v"));
        assert_eq!(uv.mul(&inv_v).as_poly(), Some(p("u")));
        let a = RationalFunction::new(p("u*v"), p("v^2")).unwrap();
        assert_eq!(a, RationalFunction::new(p("u"), p("v")).unwrap());
        assert_eq!(inv_v.derivative(1), RationalFunction::new(p("-1"), p("v^2")).unwrap());
        assert_eq!(inv_v.eval(&[rat(1), rat(0)]).unwrap(), None);
        assert_eq!(inv_v.eval(&[rat(1), rat(2)]).unwrap(), Some(crate::algebra::ratio(1, 2)));
        assert!(RationalFunction::new(p("1"), p("0")).is_err());
    }

    #[test]
    fn determinant() {
        let r = Ring::new(&["u", "v"]).unwrap();
        let p = |s: &str| RationalFunction::from_poly(Poly::parse(&r, s).unwrap());
        let m = vec![vec![p("v"), p("u")], vec![p("0"), RationalFunction::new(Poly::int(&r, -1), Poly::parse(&r, "v^2").unwrap()).unwrap()]];
        assert_eq!(RationalFunction::det(&m, &r), RationalFunction::new(Poly::int(&r, -1), Poly::parse(&r, "v").unwrap()).unwrap());
    }
}
