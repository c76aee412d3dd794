//! Charts, polynomial maps, vector fields and one-forms, and the rank
//! certificates used for smoothness and clean-intersection questions.

use std::fmt;

use num_traits::Zero;

use crate::algebra::matrix::combinations;
use crate::algebra::{parse_linear, Basis, Ideal, Poly, PolyMatrix, Rational, Ring, RingRef};
use crate::error::{Error, Result};
use crate::sample;

/// Pseudo-random points added to the default rank samples.
pub const RANDOM_RANK_SAMPLES: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    name: String,
    ring: RingRef,
}

impl Chart {
    pub fn new<S: AsRef<str>>(name: &str, vars: &[S]) -> Result<Self> {
        Ok(Chart {
            name: name.to_string(),
            ring: Ring::new(vars)?,
        })
    }

    pub fn from_ring(name: &str, ring: &RingRef) -> Self {
        Chart {
            name: name.to_string(),
            ring: ring.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.ring.nvars()
    }

    pub fn vars(&self) -> &[String] {
        self.ring.vars()
    }

    pub fn check_same(&self, other: &Chart) -> Result<()> {
        if Ring::same(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::ChartMismatch {
                expected: self.name.clone(),
                got: other.name.clone(),
            })
        }
    }

    /// Coordinate function `x_i`.
    pub fn coord(&self, i: usize) -> Poly {
        Poly::var(&self.ring, i)
    }

    pub fn identity_map(&self) -> PolyMap {
        PolyMap {
            source: self.clone(),
            target: self.clone(),
            components: (0..self.dim()).map(|i| self.coord(i)).collect(),
        }
    }
}

/// Components of each coefficient substituted along `f`.
fn compose_all(coeffs: &[Poly], f: &PolyMap) -> Vec<Poly> {
    coeffs
        .iter()
        .map(|p| p.substitute(&f.components, f.source.ring()).expect("components match the target chart"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    source: Chart,
    target: Chart,
    components: Vec<Poly>,
}

impl PolyMap {
    pub fn new(source: &Chart, target: &Chart, components: Vec<Poly>) -> Result<Self> {
        if components.len() != target.dim() {
            return Err(Error::LengthMismatch {
                expected: target.dim(),
                got: components.len(),
            });
        }
        for c in &components {
            Ring::check_same(source.ring(), c.ring())?;
        }
        Ok(PolyMap {
            source: source.clone(),
            target: target.clone(),
            components,
        })
    }

    /// Parse `(u, v) -> (u, u*v)`. The names on the left must be the source
    /// chart's coordinates in order.
    pub fn parse(source: &Chart, target: &Chart, rule: &str) -> Result<Self> {
        let (lhs, rhs) = rule.split_once("->").ok_or_else(|| Error::Parse {
            offset: 0,
            message: "expected `(vars) -> (components)`".into(),
        })?;
        let lhs_off = rule.len() - rule.trim_start().len();
        let names = strip_parens(lhs.trim(), lhs_off)?;
        let names: Vec<&str> = if names.trim().is_empty() {
            Vec::new()
        } else {
            names.split(',').map(str::trim).collect()
        };
        if names.len() != source.dim() || names.iter().zip(source.vars()).any(|(a, b)| a != b) {
            return Err(Error::Parse {
                offset: lhs_off,
                message: format!(
                    "map variables ({}) do not match chart `{}` ({})",
                    names.join(", "),
                    source.name(),
                    source.vars().join(", ")
                ),
            });
        }
        let rhs_off = lhs.len() + 2 + (rhs.len() - rhs.trim_start().len());
        let body = strip_parens(rhs.trim(), rhs_off)?;
        let mut components = Vec::new();
        let mut start = 0;
        for piece in split_top_level(body) {
            let p = Poly::parse(source.ring(), piece).map_err(|e| match e {
                Error::Parse { offset, message } => Error::Parse {
                    offset: rhs_off + 1 + start + offset,
                    message,
                },
                e => e,
            })?;
            start += piece.len() + 1;
            components.push(p);
        }
        if body.trim().is_empty() {
            components.clear();
        }
        PolyMap::new(source, target, components)
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    /// `self ∘ g`.
    pub fn compose_after(&self, g: &PolyMap) -> Result<PolyMap> {
        g.target.check_same(&self.source)?;
        PolyMap::new(&g.source, &self.target, compose_all(&self.components, g))
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    /// Substitute along the map: a polynomial on the target becomes one on
    /// the source.
    pub fn pull_function(&self, p: &Poly) -> Result<Poly> {
        Ring::check_same(self.target.ring(), p.ring())?;
        p.substitute(&self.components, self.source.ring())
    }

    /// Substitute along the map entrywise.
    pub fn pull_matrix(&self, m: &PolyMatrix) -> Result<PolyMatrix> {
        Ring::check_same(self.target.ring(), m.ring())?;
        m.substitute(&self.components, self.source.ring())
    }
}

fn strip_parens(s: &str, offset: usize) -> Result<&str> {
    s.strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse {
            offset,
            message: "expected a parenthesized list".into(),
        })
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({}) -> ({})", self.source.vars().join(", "), comps.join(", "))
    }
}

/// Jacobian matrix, `target dim x source dim`.
pub fn jacobian(f: &PolyMap) -> PolyMatrix {
    let mut j = PolyMatrix::zeros(f.source.ring(), f.target.dim(), f.source.dim());
    for (i, c) in f.components.iter().enumerate() {
        for k in 0..f.source.dim() {
            j.set(i, k, c.derivative(k));
        }
    }
    j
}

/// Polynomial vector field on a chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorFieldPoly {
    ring: RingRef,
    coeffs: Vec<Poly>,
}

impl VectorFieldPoly {
    pub fn new(chart: &Chart, coeffs: Vec<Poly>) -> Result<Self> {
        VectorFieldPoly::from_ring(chart.ring(), coeffs)
    }

    pub fn from_ring(ring: &RingRef, coeffs: Vec<Poly>) -> Result<Self> {
        if coeffs.len() != ring.nvars() {
            return Err(Error::LengthMismatch {
                expected: ring.nvars(),
                got: coeffs.len(),
            });
        }
        for c in &coeffs {
            Ring::check_same(ring, c.ring())?;
        }
        Ok(VectorFieldPoly {
            ring: ring.clone(),
            coeffs,
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        VectorFieldPoly {
            ring: chart.ring().clone(),
            coeffs: vec![Poly::zero(chart.ring()); chart.dim()],
        }
    }

    /// Coordinate field `d/dx_i`.
    pub fn coordinate(chart: &Chart, i: usize) -> Self {
        let mut v = VectorFieldPoly::zero(chart);
        v.coeffs[i] = Poly::one(chart.ring());
        v
    }

    /// Parse `x*d/dy - y*d/dx`.
    pub fn parse(chart: &Chart, text: &str) -> Result<Self> {
        let coeffs = parse_linear(chart.ring(), text, Basis::VectorField)?;
        VectorFieldPoly::new(chart, coeffs)
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Poly> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Derivation `X(p)`.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.ring);
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let d = p.derivative(j);
                if !d.is_zero() {
                    acc = &acc + &(c * &d);
                }
            }
        }
        acc
    }

    /// Lie bracket `[self, other]`.
    pub fn bracket(&self, other: &VectorFieldPoly) -> VectorFieldPoly {
        assert!(Ring::same(&self.ring, &other.ring), "bracket across charts");
        let coeffs = (0..self.coeffs.len())
            .map(|i| &self.apply(&other.coeffs[i]) - &other.apply(&self.coeffs[i]))
            .collect();
        VectorFieldPoly {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn add(&self, other: &VectorFieldPoly) -> VectorFieldPoly {
        VectorFieldPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, p: &Poly) -> VectorFieldPoly {
        VectorFieldPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| p * c).collect(),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.eval(point)).collect()
    }
}

impl fmt::Display for VectorFieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_linear(&self.ring, &self.coeffs, "d/d"))
    }
}

/// Polynomial one-form on a chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneFormPoly {
    ring: RingRef,
    coeffs: Vec<Poly>,
}

impl OneFormPoly {
    pub fn new(chart: &Chart, coeffs: Vec<Poly>) -> Result<Self> {
        OneFormPoly::from_ring(chart.ring(), coeffs)
    }

    pub fn from_ring(ring: &RingRef, coeffs: Vec<Poly>) -> Result<Self> {
        if coeffs.len() != ring.nvars() {
            return Err(Error::LengthMismatch {
                expected: ring.nvars(),
                got: coeffs.len(),
            });
        }
        for c in &coeffs {
            Ring::check_same(ring, c.ring())?;
        }
        Ok(OneFormPoly {
            ring: ring.clone(),
            coeffs,
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        OneFormPoly {
            ring: chart.ring().clone(),
            coeffs: vec![Poly::zero(chart.ring()); chart.dim()],
        }
    }

    pub fn coordinate(chart: &Chart, i: usize) -> Self {
        let mut v = OneFormPoly::zero(chart);
        v.coeffs[i] = Poly::one(chart.ring());
        v
    }

    /// Parse `x*dy - 2*dz`.
    pub fn parse(chart: &Chart, text: &str) -> Result<Self> {
        let coeffs = parse_linear(chart.ring(), text, Basis::OneForm)?;
        OneFormPoly::new(chart, coeffs)
    }

    /// Differential `dp`.
    pub fn exact(ring: &RingRef, p: &Poly) -> Self {
        OneFormPoly {
            ring: ring.clone(),
            coeffs: (0..ring.nvars()).map(|i| p.derivative(i)).collect(),
        }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `ξ(X)`.
    pub fn pair(&self, x: &VectorFieldPoly) -> Poly {
        assert!(Ring::same(&self.ring, &x.ring), "pairing across charts");
        self.coeffs
            .iter()
            .zip(&x.coeffs)
            .fold(Poly::zero(&self.ring), |acc, (a, b)| &acc + &(a * b))
    }

    pub fn add(&self, other: &OneFormPoly) -> OneFormPoly {
        OneFormPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &OneFormPoly) -> OneFormPoly {
        OneFormPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, p: &Poly) -> OneFormPoly {
        OneFormPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| p * c).collect(),
        }
    }

    /// Lie derivative `L_X self`.
    pub fn lie_derivative(&self, x: &VectorFieldPoly) -> OneFormPoly {
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|i| {
                let mut acc = x.apply(&self.coeffs[i]);
                for j in 0..n {
                    if !self.coeffs[j].is_zero() {
                        acc = &acc + &(&self.coeffs[j] * &x.coeffs[j].derivative(i));
                    }
                }
                acc
            })
            .collect();
        OneFormPoly {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    /// Contraction `ι_Y dself`.
    pub fn contract_differential(&self, y: &VectorFieldPoly) -> OneFormPoly {
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|k| {
                let mut acc = Poly::zero(&self.ring);
                for i in 0..n {
                    if y.coeffs[i].is_zero() {
                        continue;
                    }
                    let c = &self.coeffs[k].derivative(i) - &self.coeffs[i].derivative(k);
                    if !c.is_zero() {
                        acc = &acc + &(&y.coeffs[i] * &c);
                    }
                }
                acc
            })
            .collect();
        OneFormPoly {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.eval(point)).collect()
    }
}

impl fmt::Display for OneFormPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_linear(&self.ring, &self.coeffs, "d"))
    }
}

/// `c1*d/dx + ...` style rendering; `0` for the zero element.
pub fn fmt_linear(ring: &RingRef, coeffs: &[Poly], prefix: &str) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (c, v) in coeffs.iter().zip(ring.vars()) {
        if c.is_zero() {
            continue;
        }
        let atom = format!("{prefix}{v}");
        let s = if c.is_constant() {
            let q = c.constant_value().unwrap();
            if q == Rational::from_integer(1.into()) {
                atom
            } else if q == Rational::from_integer((-1).into()) {
                format!("-{atom}")
            } else {
                format!("{}*{atom}", crate::algebra::fmt_rational(&q))
            }
        } else if c.num_terms() == 1 {
            format!("{c}*{atom}")
        } else {
            format!("({c})*{atom}")
        };
        parts.push(s);
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

/// `f_* X` as a section of `f^* T(target)`, coefficients on the source.
pub fn pushforward_section(f: &PolyMap, x: &VectorFieldPoly) -> Result<Vec<Poly>> {
    if !Ring::same(f.source.ring(), &x.ring) {
        return Err(Error::ChartMismatch {
            expected: f.source.name().to_string(),
            got: "vector field chart".into(),
        });
    }
    jacobian(f).mul_vec(&x.coeffs)
}

/// `Y ∘ f`, a section of `f^* T(target)`.
pub fn compose_field(f: &PolyMap, y: &VectorFieldPoly) -> Result<Vec<Poly>> {
    if !Ring::same(f.target.ring(), &y.ring) {
        return Err(Error::ChartMismatch {
            expected: f.target.name().to_string(),
            got: "vector field chart".into(),
        });
    }
    Ok(compose_all(&y.coeffs, f))
}

/// `f^* η`.
pub fn pullback_form(f: &PolyMap, eta: &OneFormPoly) -> Result<OneFormPoly> {
    if !Ring::same(f.target.ring(), &eta.ring) {
        return Err(Error::ChartMismatch {
            expected: f.target.name().to_string(),
            got: "one-form chart".into(),
        });
    }
    let composed = compose_all(&eta.coeffs, f);
    let coeffs = jacobian(f).transpose().mul_vec(&composed)?;
    OneFormPoly::from_ring(f.source.ring(), coeffs)
}

/// Evidence that a rank is attained everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankCertificate {
    /// All entries vanish identically.
    ZeroMatrix,
    /// A maximal minor that is a nonzero constant.
    ConstantMinor {
        rows: Vec<usize>,
        cols: Vec<usize>,
        value: Rational,
    },
    /// The maximal minors, together with the locus equations, generate the
    /// unit ideal.
    UnitIdeal { minors: usize, locus_equations: usize },
    /// A maximal minor whose sign-normalized terms are even monomials with
    /// positive coefficients, including a constant term, so it has no real zero.
    PositiveMinor {
        rows: Vec<usize>,
        cols: Vec<usize>,
        value: Poly,
    },
}

/// `±p` has a positive constant term and only even monomials with positive
/// coefficients.
pub fn is_positive_even(p: &Poly) -> bool {
    let c = p.coeff(&crate::algebra::Monomial::one(p.ring().nvars()));
    if c.is_zero() {
        return false;
    }
    let sign_ok = |q: &Rational| if c > Rational::zero() { *q > Rational::zero() } else { *q < Rational::zero() };
    p.terms().all(|(m, q)| m.exponents().iter().all(|e| e % 2 == 0) && sign_ok(q))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankVerdict {
    ConstantRank {
        rank: usize,
        certificate: RankCertificate,
    },
    GenericRank {
        rank: usize,
        samples: usize,
    },
    NotConstantRank {
        generic_rank: usize,
        witness: Vec<Rational>,
        witness_rank: usize,
    },
}

impl RankVerdict {
    pub fn rank(&self) -> usize {
        match self {
            RankVerdict::ConstantRank { rank, .. } | RankVerdict::GenericRank { rank, .. } => *rank,
            RankVerdict::NotConstantRank { generic_rank, .. } => *generic_rank,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, RankVerdict::ConstantRank { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            RankVerdict::ConstantRank { .. } => "constant_rank",
            RankVerdict::GenericRank { .. } => "generic_rank",
            RankVerdict::NotConstantRank { .. } => "not_constant_rank",
        }
    }
}

impl fmt::Display for RankVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankVerdict::ConstantRank { rank, .. } => write!(f, "constant rank {rank}"),
            RankVerdict::GenericRank { rank, samples } => {
                write!(f, "generic rank {rank}, no drop on {samples} samples")
            }
            RankVerdict::NotConstantRank {
                generic_rank,
                witness,
                witness_rank,
            } => write!(
                f,
                "generic rank {generic_rank}, rank {witness_rank} at {}",
                fmt_point(witness)
            ),
        }
    }
}

pub fn fmt_point(p: &[Rational]) -> String {
    let cells: Vec<String> = p.iter().map(crate::algebra::fmt_rational).collect();
    format!("({})", cells.join(", "))
}

/// Grid points followed by seeded random points.
pub fn default_samples(nvars: usize) -> Vec<Vec<Rational>> {
    let mut pts = sample::grid_points(nvars);
    pts.extend(sample::random_points(nvars, RANDOM_RANK_SAMPLES, 0));
    pts
}

/// Constant-rank certificate for `m` on the set cut out by `locus`
/// (everywhere when `locus` is empty), relative to the generic rank of `m`.
pub fn constant_rank_on_locus(m: &PolyMatrix, locus: &[Poly], samples: &[Vec<Rational>]) -> Result<RankVerdict> {
    let n = m.ring().nvars();
    if let Some(p) = samples.iter().find(|p| p.len() != n) {
        return Err(Error::ArityMismatch {
            expected: n,
            got: p.len(),
        });
    }
    let r = m.generic_rank();
    if r == 0 {
        return Ok(RankVerdict::ConstantRank {
            rank: 0,
            certificate: RankCertificate::ZeroMatrix,
        });
    }
    let mut minors = Vec::new();
    let mut positive = None;
    for rows in combinations(m.rows(), r) {
        for cols in combinations(m.cols(), r) {
            let d = m.select(&rows, &cols).det();
            if let Some(value) = d.constant_value().filter(|v| !v.is_zero()) {
                return Ok(RankVerdict::ConstantRank {
                    rank: r,
                    certificate: RankCertificate::ConstantMinor { rows, cols, value },
                });
            }
            if positive.is_none() && is_positive_even(&d) {
                positive = Some(RankVerdict::ConstantRank {
                    rank: r,
                    certificate: RankCertificate::PositiveMinor {
                        rows: rows.clone(),
                        cols: cols.clone(),
                        value: d.clone(),
                    },
                });
            }
            if !d.is_zero() {
                minors.push(d);
            }
        }
    }
    if let Some(pos) = positive.take() {
        return Ok(pos);
    }
    let count = minors.len();
    minors.extend(locus.iter().cloned());
    if Ideal::new(m.ring(), minors)?.contains_one() {
        return Ok(RankVerdict::ConstantRank {
            rank: r,
            certificate: RankCertificate::UnitIdeal {
                minors: count,
                locus_equations: locus.len(),
            },
        });
    }
    let mut tried = 0;
    for p in samples {
        let on_locus = locus.iter().all(|e| e.eval(p).map(|v| v.is_zero()).unwrap_or(false));
        if !on_locus {
            continue;
        }
        tried += 1;
        let k = m.rank_at(p)?;
        if k < r {
            return Ok(RankVerdict::NotConstantRank {
                generic_rank: r,
                witness: p.clone(),
                witness_rank: k,
            });
        }
    }
    Ok(RankVerdict::GenericRank { rank: r, samples: tried })
}

pub fn constant_rank_certificate(m: &PolyMatrix, samples: &[Vec<Rational>]) -> Result<RankVerdict> {
    constant_rank_on_locus(m, &[], samples)
}

/// Clean-intersection verdict for `f` against `N = {last codim target
/// coordinates vanish}`: the rank of `[TN | J_f]` along `f^{-1}(N)`.
pub fn clean_intersection_check(f: &PolyMap, codim: usize, probes: &[Vec<Rational>]) -> Result<RankVerdict> {
    let n = f.target.dim();
    if codim > n {
        return Err(Error::CodimOutOfRange { dim: n, codim });
    }
    let k = n - codim;
    let ring = f.source.ring();
    let mut tn = PolyMatrix::zeros(ring, n, k);
    for i in 0..k {
        tn.set(i, i, Poly::one(ring));
    }
    let m = tn.hconcat(&jacobian(f))?;
    let locus: Vec<Poly> = f.components[k..].iter().filter(|p| !p.is_zero()).cloned().collect();
    let mut samples: Vec<Vec<Rational>> = probes.to_vec();
    samples.extend(sample::candidate_points(f.source.dim(), locus.iter(), RANDOM_RANK_SAMPLES));
    constant_rank_on_locus(&m, &locus, &samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn map(src: &[&str], tgt: &[&str], rule: &str) -> PolyMap {
        let s = Chart::new("B", src).unwrap();
        let t = Chart::new("M", tgt).unwrap();
        PolyMap::parse(&s, &t, rule).unwrap()
    }

    #[test]
    fn jacobians() {
        let p = map(&["u", "v"], &["x", "y"], "(u, v) -> (u, u*v)");
        let r = p.source().ring().clone();
        assert_eq!(jacobian(&p), PolyMatrix::parse(&r, &[vec!["1", "0"], vec!["v", "u"]]).unwrap());
        let d = map(&["t"], &["x", "y"], "(t) -> (t, t)");
        assert_eq!(jacobian(&d).column(0), vec![Poly::one(d.source().ring()); 2]);
        let c = Chart::new("M", &["x", "y", "z"]).unwrap();
        assert_eq!(jacobian(&c.identity_map()), PolyMatrix::identity(c.ring(), 3));
    }

    #[test]
    fn map_parse_errors() {
        let s = Chart::new("B", &["t"]).unwrap();
        let t = Chart::new("M", &["x", "y"]).unwrap();
        assert!(PolyMap::parse(&s, &t, "(s) -> (s, 0)").is_err());
        assert!(PolyMap::parse(&s, &t, "(t) -> (t)").is_err());
        match PolyMap::parse(&s, &t, "(t) -> (t, t^^2)") {
            Err(Error::Parse { offset, .. }) => assert_eq!(&"(t) -> (t, t^^2)"[offset..offset + 1], "^"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pushforwards() {
        let p = map(&["u", "v"], &["x", "y"], "(u, v) -> (u, u*v)");
        let x = VectorFieldPoly::parse(p.source(), "u*d/du + v*d/dv").unwrap();
        let push = pushforward_section(&p, &x).unwrap();
        let r = p.source().ring();
        assert_eq!(push, vec![Poly::parse(r, "u").unwrap(), Poly::parse(r, "2*u*v").unwrap()]);
        let c = Chart::new("M", &["x", "y"]).unwrap();
        let y = VectorFieldPoly::parse(&c, "x*d/dy + d/dx").unwrap();
        assert_eq!(pushforward_section(&c.identity_map(), &y).unwrap(), y.coeffs().to_vec());
        let k = map(&["t"], &["x", "y"], "(t) -> (1, 2)");
        let z = VectorFieldPoly::parse(k.source(), "t*d/dt").unwrap();
        assert!(pushforward_section(&k, &z).unwrap().iter().all(|p| p.is_zero()));
    }

    #[test]
    fn pullbacks() {
        let f = map(&["t"], &["x", "y"], "(t) -> (t, 0)");
        let dy = OneFormPoly::parse(f.target(), "dy").unwrap();
        assert!(pullback_form(&f, &dy).unwrap().is_zero());
        let dx = OneFormPoly::parse(f.target(), "dx").unwrap();
        assert_eq!(pullback_form(&f, &dx).unwrap(), OneFormPoly::parse(f.source(), "dt").unwrap());
        let p = map(&["u", "v"], &["x", "y"], "(u, v) -> (u, u*v)");
        let dy = OneFormPoly::parse(p.target(), "dy").unwrap();
        assert_eq!(pullback_form(&p, &dy).unwrap(), OneFormPoly::parse(p.source(), "v*du + u*dv").unwrap());
    }

    #[test]
    fn brackets_and_forms() {
        let c = Chart::new("M", &["x", "y"]).unwrap();
        let dx = VectorFieldPoly::parse(&c, "d/dx").unwrap();
        let xdy = VectorFieldPoly::parse(&c, "x*d/dy").unwrap();
        assert_eq!(dx.bracket(&xdy), VectorFieldPoly::parse(&c, "d/dy").unwrap());
        assert_eq!(xdy.to_string(), "x*d/dy");
        let w = OneFormPoly::parse(&c, "x*dy").unwrap();
        assert_eq!(w.lie_derivative(&dx), OneFormPoly::parse(&c, "dy").unwrap());
        assert_eq!(w.contract_differential(&dx), OneFormPoly::parse(&c, "dy").unwrap());
        assert_eq!(OneFormPoly::parse(&c, "-dx + 2*x*dy").unwrap().to_string(), "-dx + 2*x*dy");
    }

    #[test]
    fn constant_rank_examples() {
        let r = Ring::new(&["x"]).unwrap();
        let id = PolyMatrix::identity(&r, 3);
        assert_eq!(constant_rank_certificate(&id, &default_samples(1)).unwrap().rank(), 3);
        assert!(constant_rank_certificate(&id, &[]).unwrap().is_constant());
        let m = PolyMatrix::parse(&r, &[vec!["x"]]).unwrap();
        assert_eq!(
            constant_rank_certificate(&m, &[vec![rat(0)], vec![rat(1)]]).unwrap(),
            RankVerdict::NotConstantRank {
                generic_rank: 1,
                witness: vec![rat(0)],
                witness_rank: 0
            }
        );
        let s = PolyMatrix::parse(&r, &[vec!["-x^2 - 1"]]).unwrap();
        assert!(matches!(
            constant_rank_certificate(&s, &default_samples(1)).unwrap(),
            RankVerdict::ConstantRank { rank: 1, certificate: RankCertificate::PositiveMinor { .. } }
        ));
        let s = PolyMatrix::parse(&r, &[vec!["x^2 - 2*x + 2"]]).unwrap();
        assert!(matches!(
            constant_rank_certificate(&s, &default_samples(1)).unwrap(),
            RankVerdict::GenericRank { rank: 1, .. }
        ));
        assert!(!is_positive_even(&Poly::parse(&r, "x^2").unwrap()));
        assert!(constant_rank_certificate(&m, &[vec![rat(0), rat(0)]]).is_err());
    }

    #[test]
    fn clean_intersections() {
        let axis = map(&["t"], &["x", "y"], "(t) -> (t, 0)");
        assert_eq!(clean_intersection_check(&axis, 1, &[]).unwrap().rank(), 1);
        assert!(clean_intersection_check(&axis, 1, &[]).unwrap().is_constant());
        let diag = map(&["t"], &["x", "y"], "(t) -> (t, t)");
        let v = clean_intersection_check(&diag, 1, &[]).unwrap();
        assert!(v.is_constant() && v.rank() == 2);
        let parab = map(&["t"], &["x", "y"], "(t) -> (t, t^2)");
        assert_eq!(
            clean_intersection_check(&parab, 1, &[]).unwrap(),
            RankVerdict::NotConstantRank {
                generic_rank: 2,
                witness: vec![rat(0)],
                witness_rank: 1
            }
        );
        assert!(clean_intersection_check(&parab, 3, &[]).is_err());
    }
}
