//! Exact polynomial arithmetic over the rationals.

pub mod groebner;
pub mod ideal;
pub mod linalg;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod rational_function;
pub mod ring;

pub type Rational = num_rational::BigRational;

pub use groebner::{groebner_basis, normal_form, set_groebner_cache, GroebnerCache};
pub use ideal::Ideal;
pub use linalg::QMatrix;
pub use matrix::PolyMatrix;
pub use parse::{parse_linear, parse_poly, Basis};
pub use poly::{fmt_rational, rat, ratio, Poly};
pub use rational_function::RationalFunction;
pub use ring::{Monomial, MonomialOrder, Ring, RingRef};
