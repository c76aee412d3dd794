//! Submodules of free modules `R^m` over a polynomial ring: Gröbner bases,
//! membership with certificates, syzygies, intersections and preimages.
//!
//! Membership is decided over polynomials. A positive answer carries the
//! coefficients; a negative answer is a proof in the smooth category only
//! when some point is found where the element leaves the pointwise span of
//! the generators. Otherwise the verdict stays inconclusive.

use std::fmt;

use num_traits::Zero;

use crate::algebra::groebner::{buchberger, reduce, MVec};
use crate::algebra::{MonomialOrder, Poly, PolyMatrix, QMatrix, Rational, Ring, RingRef};
use crate::error::{Error, Result};
use crate::sample;

/// Number of extra pseudo-random refutation candidates.
const RANDOM_REFUTATION_POINTS: usize = 16;

/// Finitely generated submodule of `R^rank`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmodulePresentation {
    ring: RingRef,
    rank: usize,
    gens: Vec<Vec<Poly>>,
}

impl SubmodulePresentation {
    pub fn new(ring: &RingRef, rank: usize, gens: Vec<Vec<Poly>>) -> Result<Self> {
        for g in &gens {
            if g.len() != rank {
                return Err(Error::LengthMismatch {
                    expected: rank,
                    got: g.len(),
                });
            }
            for p in g {
                Ring::check_same(ring, p.ring())?;
            }
        }
        Ok(SubmodulePresentation {
            ring: ring.clone(),
            rank,
            gens,
        })
    }

    pub fn zero(ring: &RingRef, rank: usize) -> Self {
        SubmodulePresentation {
            ring: ring.clone(),
            rank,
            gens: Vec::new(),
        }
    }

    /// The whole free module, generated by the unit vectors.
    pub fn free(ring: &RingRef, rank: usize) -> Self {
        let gens = (0..rank).map(|i| unit_vector(ring, rank, i)).collect();
        SubmodulePresentation {
            ring: ring.clone(),
            rank,
            gens,
        }
    }

    /// Module generated by the columns of `m`.
    pub fn column_span(m: &PolyMatrix) -> Self {
        SubmodulePresentation {
            ring: m.ring().clone(),
            rank: m.rows(),
            gens: m.columns(),
        }
    }

    pub fn parse_rows(ring: &RingRef, rank: usize, rows: &[Vec<&str>]) -> Result<Self> {
        let gens = rows
            .iter()
            .map(|r| r.iter().map(|s| Poly::parse(ring, s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        SubmodulePresentation::new(ring, rank, gens)
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<Poly>] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Generator matrix, one column per generator.
    pub fn matrix(&self) -> PolyMatrix {
        PolyMatrix::from_columns(&self.ring, self.rank, &self.gens).expect("generators have ambient length")
    }

    /// Same module with zero and repeated generators dropped.
    pub fn without_trivial(&self) -> Self {
        let mut gens: Vec<Vec<Poly>> = Vec::new();
        for g in &self.gens {
            if g.iter().any(|p| !p.is_zero()) && !gens.contains(g) {
                gens.push(g.clone());
            }
        }
        SubmodulePresentation {
            ring: self.ring.clone(),
            rank: self.rank,
            gens,
        }
    }

    /// Drop generators that are polynomial combinations of the others,
    /// scanning from the last one.
    pub fn minimalized(&self) -> Self {
        let mut cur = self.without_trivial();
        let mut i = cur.gens.len();
        while i > 0 {
            i -= 1;
            let mut others = cur.clone();
            let g = others.gens.remove(i);
            if SubmoduleGb::new(&others).coefficients(&g).is_some() {
                cur = others;
            }
        }
        cur
    }

    pub fn with_generator(&self, g: Vec<Poly>) -> Result<Self> {
        let mut gens = self.gens.clone();
        gens.push(g);
        SubmodulePresentation::new(&self.ring, self.rank, gens)
    }

    pub fn concat(&self, other: &SubmodulePresentation) -> Result<Self> {
        check_ambient(self, other)?;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ok(SubmodulePresentation {
            ring: self.ring.clone(),
            rank: self.rank,
            gens,
        })
    }

    /// Image under a matrix acting on the ambient module.
    pub fn image(&self, m: &PolyMatrix) -> Result<Self> {
        if m.cols() != self.rank {
            return Err(Error::DimensionMismatch("matrix does not act on the ambient module".into()));
        }
        let gens = self.gens.iter().map(|g| m.mul_vec(g)).collect::<Result<Vec<_>>>()?;
        SubmodulePresentation::new(&self.ring, m.rows(), gens)
    }
}

impl fmt::Display for SubmodulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_vector(g))?;
        }
        write!(f, ">")
    }
}

pub fn fmt_vector(v: &[Poly]) -> String {
    let cells: Vec<String> = v.iter().map(|p| p.to_string()).collect();
    format!("({})", cells.join(", "))
}

pub fn unit_vector(ring: &RingRef, rank: usize, i: usize) -> Vec<Poly> {
    (0..rank)
        .map(|k| if k == i { Poly::one(ring) } else { Poly::zero(ring) })
        .collect()
}

pub fn zero_vector(ring: &RingRef, rank: usize) -> Vec<Poly> {
    vec![Poly::zero(ring); rank]
}

/// `sum_i coeffs[i] * gens[i]`.
pub fn combine(ring: &RingRef, rank: usize, coeffs: &[Poly], gens: &[Vec<Poly>]) -> Vec<Poly> {
    let mut acc = zero_vector(ring, rank);
    for (c, g) in coeffs.iter().zip(gens) {
        if c.is_zero() {
            continue;
        }
        for (a, p) in acc.iter_mut().zip(g) {
            if !p.is_zero() {
                *a = &*a + &(c * p);
            }
        }
    }
    acc
}

pub fn vector_sub(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vector_add(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vector_scale(c: &Poly, v: &[Poly]) -> Vec<Poly> {
    v.iter().map(|p| c * p).collect()
}

pub fn is_zero_vector(v: &[Poly]) -> bool {
    v.iter().all(|p| p.is_zero())
}

fn check_ambient(a: &SubmodulePresentation, b: &SubmodulePresentation) -> Result<()> {
    Ring::check_same(&a.ring, &b.ring)?;
    if a.rank != b.rank {
        return Err(Error::DimensionMismatch(format!(
            "ambient ranks {} and {} differ",
            a.rank, b.rank
        )));
    }
    Ok(())
}

fn check_element(s: &SubmodulePresentation, elem: &[Poly]) -> Result<()> {
    if elem.len() != s.rank {
        return Err(Error::LengthMismatch {
            expected: s.rank,
            got: elem.len(),
        });
    }
    for p in elem {
        Ring::check_same(&s.ring, p.ring())?;
    }
    Ok(())
}

/// Reduced Gröbner basis of the submodule (position over term).
pub fn module_groebner(s: &SubmodulePresentation, order: MonomialOrder) -> Vec<Vec<Poly>> {
    let vs: Vec<MVec> = s
        .gens
        .iter()
        .map(|g| MVec::from_components(g, 0, order))
        .filter(|v| !v.is_zero())
        .collect();
    buchberger(&vs, order, s.rank == 1)
        .iter()
        .map(|v| v.components(&s.ring, 0, s.rank))
        .collect()
}

/// Gröbner data for a presentation augmented by the unit vectors of
/// `R^{#gens}`; gives membership coefficients and syzygies.
#[derive(Clone, Debug)]
pub struct SubmoduleGb {
    module: SubmodulePresentation,
    order: MonomialOrder,
    basis: Vec<MVec>,
}

impl SubmoduleGb {
    pub fn new(s: &SubmodulePresentation) -> Self {
        SubmoduleGb::with_order(s, MonomialOrder::GRevLex)
    }

    pub fn with_order(s: &SubmodulePresentation, order: MonomialOrder) -> Self {
        let k = s.gens.len();
        let gens: Vec<MVec> = s
            .gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut comps = g.clone();
                comps.extend(unit_vector(&s.ring, k, i));
                MVec::from_components(&comps, 0, order)
            })
            .collect();
        SubmoduleGb {
            module: s.clone(),
            order,
            basis: buchberger(&gens, order, false),
        }
    }

    pub fn module(&self) -> &SubmodulePresentation {
        &self.module
    }

    /// Coefficients `h` with `elem = sum h_i gen_i`, when they exist.
    pub fn coefficients(&self, elem: &[Poly]) -> Option<Vec<Poly>> {
        let m = self.module.rank;
        let k = self.module.gens.len();
        let v = MVec::from_components(elem, 0, self.order);
        let r = reduce(&v, &self.basis, self.order);
        if r.terms.iter().any(|(t, _)| t.pos < m) {
            return None;
        }
        Some(r.components(&self.module.ring, m, k).into_iter().map(|p| -p).collect())
    }

    /// Generators of the syzygy module, in `R^{#gens}`.
    pub fn syzygies(&self) -> SubmodulePresentation {
        let m = self.module.rank;
        let k = self.module.gens.len();
        let gens = self
            .basis
            .iter()
            .filter(|v| v.lead_pos() >= m)
            .map(|v| v.components(&self.module.ring, m, k))
            .collect();
        SubmodulePresentation {
            ring: self.module.ring.clone(),
            rank: k,
            gens,
        }
    }

    pub fn membership(&self, elem: &[Poly]) -> Result<MembershipResult> {
        check_element(&self.module, elem)?;
        if let Some(h) = self.coefficients(elem) {
            return Ok(MembershipResult::InModule(h));
        }
        Ok(refute(&self.module, elem, &[]))
    }

    /// Like [`membership`](Self::membership) with extra refutation candidates
    /// tried before the standard ones.
    pub fn membership_with_points(&self, elem: &[Poly], extra: &[Vec<Rational>]) -> Result<MembershipResult> {
        check_element(&self.module, elem)?;
        if let Some(h) = self.coefficients(elem) {
            return Ok(MembershipResult::InModule(h));
        }
        Ok(refute(&self.module, elem, extra))
    }
}

/// Outcome of a membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipResult {
    InModule(Vec<Poly>),
    /// At `point` the functional kills every generator but not the element.
    RefutedAtPoint {
        point: Vec<Rational>,
        functional: Vec<Rational>,
    },
    NotPolynomialCombination,
}

impl MembershipResult {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipResult::InModule(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, MembershipResult::RefutedAtPoint { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            MembershipResult::InModule(_) => "in_module",
            MembershipResult::RefutedAtPoint { .. } => "refuted_at_point",
            MembershipResult::NotPolynomialCombination => "not_polynomial_combination",
        }
    }
}

/// Look for a point where `elem` is outside the span of the generators.
fn refute(s: &SubmodulePresentation, elem: &[Poly], extra: &[Vec<Rational>]) -> MembershipResult {
    let n = s.ring.nvars();
    let entries = s.gens.iter().flatten().chain(elem.iter());
    let mut points: Vec<Vec<Rational>> = extra.to_vec();
    points.extend(sample::candidate_points(n, entries, RANDOM_REFUTATION_POINTS));
    let gm = s.matrix();
    for p in points {
        if p.len() != n {
            continue;
        }
        if let Some(functional) = separating_functional(&gm, elem, &p) {
            return MembershipResult::RefutedAtPoint { point: p, functional };
        }
    }
    MembershipResult::NotPolynomialCombination
}

/// A covector vanishing on the columns of `g(p)` but not on `v(p)`.
pub fn separating_functional(g: &PolyMatrix, v: &[Poly], p: &[Rational]) -> Option<Vec<Rational>> {
    let vp: Vec<Rational> = v.iter().map(|x| x.eval(p).expect("arity checked")).collect();
    if vp.iter().all(|x| x.is_zero()) {
        return None;
    }
    let gp = if g.cols() == 0 {
        QMatrix::zeros(v.len(), 0)
    } else {
        g.eval(p).expect("arity checked")
    };
    if g.cols() > 0 && gp.solve(&vp).is_some() {
        return None;
    }
    gp.transpose().nullspace().into_iter().find(|l| {
        let s: Rational = l.iter().zip(&vp).map(|(a, b)| a * b).sum();
        !s.is_zero()
    })
}

pub fn module_membership(elem: &[Poly], s: &SubmodulePresentation) -> Result<MembershipResult> {
    SubmoduleGb::new(s).membership(elem)
}

pub fn syzygies(s: &SubmodulePresentation) -> SubmodulePresentation {
    SubmoduleGb::new(s).syzygies()
}

pub fn submodule_intersection(a: &SubmodulePresentation, b: &SubmodulePresentation) -> Result<SubmodulePresentation> {
    check_ambient(a, b)?;
    let both = a.concat(b)?;
    let syz = syzygies(&both);
    let na = a.gens.len();
    let gens = syz
        .gens
        .iter()
        .map(|c| combine(&a.ring, a.rank, &c[..na], &a.gens))
        .collect();
    Ok(SubmodulePresentation {
        ring: a.ring.clone(),
        rank: a.rank,
        gens,
    }
    .without_trivial())
}

/// `{x : m x in target}`.
pub fn preimage_module(m: &PolyMatrix, target: &SubmodulePresentation) -> Result<SubmodulePresentation> {
    Ring::check_same(m.ring(), &target.ring)?;
    if m.rows() != target.rank {
        return Err(Error::DimensionMismatch(format!(
            "map has {} rows but the target module lives in rank {}",
            m.rows(),
            target.rank
        )));
    }
    let p = m.cols();
    let mut cols = m.columns();
    cols.extend(target.gens.iter().cloned());
    let joint = SubmodulePresentation {
        ring: m.ring().clone(),
        rank: m.rows(),
        gens: cols,
    };
    let gens = syzygies(&joint).gens.into_iter().map(|c| c[..p].to_vec()).collect();
    Ok(SubmodulePresentation {
        ring: m.ring().clone(),
        rank: p,
        gens,
    }
    .without_trivial())
}

/// Result of testing `inner ⊆ outer` generator by generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    /// Coefficients expressing each inner generator.
    Contained(Vec<Vec<Poly>>),
    Missing {
        index: usize,
        element: Vec<Poly>,
        result: MembershipResult,
    },
}

impl Containment {
    pub fn holds(&self) -> bool {
        matches!(self, Containment::Contained(_))
    }

    pub fn refuted(&self) -> bool {
        matches!(self, Containment::Missing { result, .. } if result.is_refuted())
    }
}

/// Whether every generator of `inner` lies in `outer`. On failure, a refuted
/// generator is preferred over an inconclusive one.
pub fn contains(outer: &SubmodulePresentation, inner: &SubmodulePresentation) -> Result<Containment> {
    check_ambient(outer, inner)?;
    let gb = SubmoduleGb::new(outer);
    let mut coeffs = Vec::new();
    let mut inconclusive: Option<Containment> = None;
    for (index, g) in inner.gens.iter().enumerate() {
        match gb.membership(g)? {
            MembershipResult::InModule(h) => coeffs.push(h),
            result @ MembershipResult::RefutedAtPoint { .. } => {
                return Ok(Containment::Missing {
                    index,
                    element: g.clone(),
                    result,
                })
            }
            result => {
                if inconclusive.is_none() {
                    inconclusive = Some(Containment::Missing {
                        index,
                        element: g.clone(),
                        result,
                    });
                }
            }
        }
    }
    Ok(inconclusive.unwrap_or(Containment::Contained(coeffs)))
}

/// Mutual containment of two presentations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleEquality {
    /// Generators of `b` inside `a`.
    pub b_in_a: Containment,
    /// Generators of `a` inside `b`.
    pub a_in_b: Containment,
}

impl ModuleEquality {
    pub fn is_equal(&self) -> bool {
        self.a_in_b.holds() && self.b_in_a.holds()
    }

    /// The first failing direction, if any.
    pub fn witness(&self) -> Option<&Containment> {
        [&self.a_in_b, &self.b_in_a].into_iter().find(|c| !c.holds())
    }

    /// `a` is certified to be a proper submodule of `b`.
    pub fn strictly_smaller(&self) -> bool {
        self.a_in_b.holds() && self.b_in_a.refuted()
    }
}

pub fn submodule_equal(a: &SubmodulePresentation, b: &SubmodulePresentation) -> Result<ModuleEquality> {
    Ok(ModuleEquality {
        a_in_b: contains(b, a)?,
        b_in_a: contains(a, b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn ring(vars: &[&str]) -> RingRef {
        Ring::new(vars).unwrap()
    }

    fn module(r: &RingRef, rank: usize, rows: &[&[&str]]) -> SubmodulePresentation {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        SubmodulePresentation::parse_rows(r, rank, &rows).unwrap()
    }

    fn vecp(r: &RingRef, xs: &[&str]) -> Vec<Poly> {
        xs.iter().map(|s| Poly::parse(r, s).unwrap()).collect()
    }

    #[test]
    fn groebner_examples() {
        let r = ring(&["x", "y"]);
        let s = module(&r, 2, &[&["x", "0"], &["0", "y"]]);
        assert_eq!(module_groebner(&s, MonomialOrder::GRevLex), s.gens);
        let t = module(&r, 2, &[&["x", "x"], &["x", "0"]]);
        let gb = module_groebner(&t, MonomialOrder::GRevLex);
        assert!(submodule_equal(&SubmodulePresentation::new(&r, 2, gb).unwrap(), &module(&r, 2, &[&["x", "0"], &["0", "x"]]))
            .unwrap()
            .is_equal());
        let u = module(&r, 2, &[&["1", "0"], &["0", "1"]]);
        assert_eq!(module_groebner(&u, MonomialOrder::GRevLex), u.gens);
    }

    #[test]
    fn membership_examples() {
        let r = ring(&["x"]);
        let s = module(&r, 1, &[&["x"]]);
        assert_eq!(
            module_membership(&vecp(&r, &["x^2"]), &s).unwrap(),
            MembershipResult::InModule(vecp(&r, &["x"]))
        );
        match module_membership(&vecp(&r, &["1"]), &s).unwrap() {
            MembershipResult::RefutedAtPoint { point, functional } => {
                assert_eq!(point, vec![rat(0)]);
                assert_eq!(functional, vec![rat(1)]);
            }
            other => panic!("{other:?}"),
        }
        match module_membership(&vecp(&r, &["2"]), &s).unwrap() {
            MembershipResult::RefutedAtPoint { point, .. } => assert_eq!(point, vec![rat(0)]),
            other => panic!("{other:?}"),
        }
        assert!(module_membership(&vecp(&r, &["1", "0"]), &s).is_err());
    }

    #[test]
    fn inconclusive_without_pointwise_witness() {
        // x^2 + 1 never vanishes on the reals, and 1 is not a multiple of it.
        let r = ring(&["x"]);
        let s = module(&r, 1, &[&["x^2 + 1"]]);
        assert_eq!(
            module_membership(&vecp(&r, &["1"]), &s).unwrap(),
            MembershipResult::NotPolynomialCombination
        );
    }

    #[test]
    fn syzygy_examples() {
        let r = ring(&["x", "y"]);
        let k = syzygies(&module(&r, 1, &[&["x"], &["y"]]));
        assert!(submodule_equal(&k, &module(&r, 2, &[&["y", "-x"]])).unwrap().is_equal());
        assert!(syzygies(&module(&r, 2, &[&["1", "0"], &["0", "1"]])).is_empty());
        let d = syzygies(&module(&r, 2, &[&["x", "0"], &["x", "0"]]));
        assert!(submodule_equal(&d, &module(&r, 2, &[&["1", "-1"]])).unwrap().is_equal());
    }

    #[test]
    fn intersection_examples() {
        let r = ring(&["x", "y"]);
        let dx = module(&r, 2, &[&["1", "0"]]);
        let dy = module(&r, 2, &[&["0", "1"]]);
        assert!(submodule_intersection(&dx, &dy).unwrap().is_empty());
        let diag = module(&r, 2, &[&["1", "1"]]);
        assert!(submodule_intersection(&diag, &dx).unwrap().is_empty());
        let full = module(&r, 2, &[&["1", "0"], &["0", "1"]]);
        let xdx = module(&r, 2, &[&["x", "0"]]);
        let i = submodule_intersection(&full, &xdx).unwrap();
        assert!(submodule_equal(&i, &xdx).unwrap().is_equal());
    }

    #[test]
    fn preimage_examples() {
        let r = ring(&["t"]);
        let s = module(&r, 2, &[&["1", "0"]]);
        let id = PolyMatrix::identity(&r, 2);
        assert!(submodule_equal(&preimage_module(&id, &s).unwrap(), &s).unwrap().is_equal());
        let j = PolyMatrix::parse(&r, &[vec!["1"], vec!["1"]]).unwrap();
        assert!(preimage_module(&j, &s).unwrap().is_empty());
        let z = PolyMatrix::zeros(&r, 2, 3);
        let pre = preimage_module(&z, &s).unwrap();
        assert!(submodule_equal(&pre, &SubmodulePresentation::free(&r, 3)).unwrap().is_equal());
    }

    #[test]
    fn equality_examples() {
        let r = ring(&["u", "v"]);
        let a = module(&r, 2, &[&["u", "0"], &["0", "1"]]);
        let b = module(&r, 2, &[&["0", "1"], &["u", "0"]]);
        assert!(submodule_equal(&a, &b).unwrap().is_equal());
        let lifts = module(&r, 2, &[&["u", "-v"], &["0", "1"], &["u*v", "-v^2"], &["0", "v"]]);
        assert!(submodule_equal(&lifts, &a).unwrap().is_equal());

        let r = ring(&["x"]);
        let e = submodule_equal(&module(&r, 1, &[&["1"]]), &module(&r, 1, &[&["x"]])).unwrap();
        assert!(!e.is_equal());
        match e.witness().unwrap() {
            Containment::Missing { element, result, .. } => {
                assert_eq!(element, &vecp(&r, &["1"]));
                assert!(matches!(result, MembershipResult::RefutedAtPoint { point, .. } if point == &vec![rat(0)]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimalized_drops_redundant() {
        let r = ring(&["u", "v"]);
        let lifts = module(&r, 2, &[&["u", "-v"], &["0", "1"], &["u*v", "-v^2"], &["0", "v"]]);
        assert_eq!(lifts.minimalized().len(), 2);
    }
}
