//! Dirac structures presented by sections of `TM ⊕ T*M`, the Courant
//! bracket, backward images along polynomial maps and the map
//! `ψ: f^!L → 𝔅L`.
//!
//! Sign conventions: `π♯dx_i = sum_j π^{ij} ∂_j`, so `graph(π)` is spanned
//! by `(π♯dx_i, dx_i)`; `graph(ω)` is spanned by `(∂_i, sum_j ω_ij dx_j)`.

use std::fmt;

use crate::algebra::matrix::combinations;
use crate::algebra::{Poly, PolyMatrix, Rational, Ring};
use crate::algebroid::{pullback_algebroid, AlgebroidPresentation, AxiomsVerdict, PullbackAlgebroid};
use crate::charts::{
    constant_rank_certificate, jacobian, pullback_form, Chart, OneFormPoly, PolyMap, RankVerdict, VectorFieldPoly,
};
use crate::error::{Error, Result};
use crate::foliation::{composed_generators, pullback_foliation, transversality_report, InvolutivityVerdict, SingularFoliation};
use crate::sample;
use crate::submodule::{
    preimage_module, submodule_equal, Containment, MembershipResult, ModuleEquality, SubmoduleGb, SubmodulePresentation,
};

/// Random points used for pointwise injectivity checks.
pub const INJECTIVITY_SAMPLES: usize = 25;

/// A section `(X, ξ)` of `TM ⊕ T*M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    pub vector: VectorFieldPoly,
    pub form: OneFormPoly,
}

impl Section {
    pub fn new(vector: VectorFieldPoly, form: OneFormPoly) -> Result<Self> {
        Ring::check_same(vector.ring(), form.ring())?;
        Ok(Section { vector, form })
    }

    pub fn parse(chart: &Chart, vector: &str, form: &str) -> Result<Self> {
        Section::new(VectorFieldPoly::parse(chart, vector)?, OneFormPoly::parse(chart, form)?)
    }

    /// Coefficients `(X^1..X^n, ξ_1..ξ_n)`.
    pub fn to_vec(&self) -> Vec<Poly> {
        let mut v = self.vector.coeffs().to_vec();
        v.extend(self.form.coeffs().iter().cloned());
        v
    }

    pub fn from_vec(chart: &Chart, v: &[Poly]) -> Result<Self> {
        let n = chart.dim();
        if v.len() != 2 * n {
            return Err(Error::LengthMismatch {
                expected: 2 * n,
                got: v.len(),
            });
        }
        Section::new(VectorFieldPoly::new(chart, v[..n].to_vec())?, OneFormPoly::new(chart, v[n..].to_vec())?)
    }

    pub fn is_zero(&self) -> bool {
        self.vector.is_zero() && self.form.is_zero()
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.vector, self.form)
    }
}

/// `⟨(X, ξ), (X', ξ')⟩ = ξ'(X) + ξ(X')`.
pub fn pairing(a: &Section, b: &Section) -> Poly {
    &b.form.pair(&a.vector) + &a.form.pair(&b.vector)
}

/// `([X, X'], L_X ξ' - ι_{X'} dξ)`.
pub fn courant_bracket(a: &Section, b: &Section) -> Result<Section> {
    Ring::check_same(a.vector.ring(), b.vector.ring())?;
    let v = a.vector.bracket(&b.vector);
    let f = b.form.lie_derivative(&a.vector).sub(&a.form.contract_differential(&b.vector));
    Section::new(v, f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracSpan {
    chart: Chart,
    gens: Vec<Section>,
}

impl DiracSpan {
    pub fn new(chart: &Chart, gens: Vec<Section>) -> Result<Self> {
        if gens.len() != chart.dim() {
            return Err(Error::LengthMismatch {
                expected: chart.dim(),
                got: gens.len(),
            });
        }
        for g in &gens {
            Ring::check_same(chart.ring(), g.vector.ring())?;
        }
        Ok(DiracSpan {
            chart: chart.clone(),
            gens,
        })
    }

    /// `graph(π)` for a skew matrix `π^{ij}`.
    pub fn poisson_graph(chart: &Chart, pi: &PolyMatrix) -> Result<Self> {
        let n = chart.dim();
        check_skew(chart, pi)?;
        let gens = (0..n)
            .map(|i| Section::new(VectorFieldPoly::new(chart, pi.row(i).to_vec())?, OneFormPoly::coordinate(chart, i)))
            .collect::<Result<Vec<_>>>()?;
        DiracSpan::new(chart, gens)
    }

    /// `graph(ω)` for a skew matrix `ω_ij`.
    pub fn two_form_graph(chart: &Chart, omega: &PolyMatrix) -> Result<Self> {
        let n = chart.dim();
        check_skew(chart, omega)?;
        let gens = (0..n)
            .map(|i| Section::new(VectorFieldPoly::coordinate(chart, i), OneFormPoly::new(chart, omega.row(i).to_vec())?))
            .collect::<Result<Vec<_>>>()?;
        DiracSpan::new(chart, gens)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn generators(&self) -> &[Section] {
        &self.gens
    }

    /// Sections as a submodule of `R^{2n}`.
    pub fn module(&self) -> SubmodulePresentation {
        SubmodulePresentation::new(self.chart.ring(), 2 * self.chart.dim(), self.gens.iter().map(Section::to_vec).collect())
            .expect("sections have length 2n")
    }

    /// The stacked `2n x n` coefficient matrix.
    pub fn matrix(&self) -> PolyMatrix {
        self.module().matrix()
    }

    /// `F_L`, spanned by the vector parts.
    pub fn foliation(&self) -> SingularFoliation {
        let gens = self.gens.iter().map(|s| s.vector.coeffs().to_vec()).collect();
        let m = SubmodulePresentation::new(self.chart.ring(), self.chart.dim(), gens)
            .expect("vector parts")
            .without_trivial();
        SingularFoliation::new(&self.chart, m).expect("vector fields on the chart")
    }
}

fn check_skew(chart: &Chart, m: &PolyMatrix) -> Result<()> {
    let n = chart.dim();
    Ring::check_same(chart.ring(), m.ring())?;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!("expected an {n}x{n} matrix")));
    }
    if m.transpose() != m.scale(&Rational::from_integer((-1).into())) {
        return Err(Error::MalformedStructure("matrix is not skew-symmetric".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracCheck {
    /// First generator pair with nonzero pairing.
    pub isotropy_failure: Option<(usize, usize, Poly)>,
    pub generic_rank: usize,
    pub rank: RankVerdict,
    pub involutivity: InvolutivityVerdict,
}

impl DiracCheck {
    pub fn isotropic(&self) -> bool {
        self.isotropy_failure.is_none()
    }

    pub fn passes(&self, n: usize) -> bool {
        self.isotropic() && self.generic_rank == n && self.rank.is_constant() && self.involutivity.is_verified()
    }
}

pub fn isotropy_failure(gens: &[Section]) -> Option<(usize, usize, Poly)> {
    for i in 0..gens.len() {
        for j in i..gens.len() {
            let p = pairing(&gens[i], &gens[j]);
            if !p.is_zero() {
                return Some((i, j, p));
            }
        }
    }
    None
}

pub fn dirac_check(l: &DiracSpan) -> DiracCheck {
    let isotropy_failure = isotropy_failure(&l.gens);
    let m = l.matrix();
    let generic_rank = m.generic_rank();
    let rank = constant_rank_certificate(&m, &crate::charts::default_samples(l.chart.dim())).expect("arity matches");
    let module = l.module();
    let gb = SubmoduleGb::new(&module);
    let mut involutivity = InvolutivityVerdict::Verified;
    'outer: for i in 0..l.gens.len() {
        for j in 0..l.gens.len() {
            let b = courant_bracket(&l.gens[i], &l.gens[j]).expect("same chart");
            if b.is_zero() {
                continue;
            }
            match gb.membership(&b.to_vec()).expect("length 2n") {
                MembershipResult::InModule(_) => {}
                result @ MembershipResult::RefutedAtPoint { .. } => {
                    involutivity = InvolutivityVerdict::NotVerified {
                        pair: (i, j),
                        bracket: b.vector.clone(),
                        result,
                    };
                    break 'outer;
                }
                MembershipResult::NotPolynomialCombination => {
                    if involutivity.is_verified() {
                        involutivity = InvolutivityVerdict::Inconclusive {
                            pair: (i, j),
                            bracket: b.vector.clone(),
                        };
                    }
                }
            }
        }
    }
    DiracCheck {
        isotropy_failure,
        generic_rank,
        rank,
        involutivity,
    }
}

/// Rank-`n` algebroid with anchor columns the vector parts of the
/// generators and structure functions read off from Courant brackets.
/// Brackets `[s_i, s_j]` are expanded for `i < j`; the rest follows by
/// skew symmetry, which holds on isotropic spans.
pub fn underlying_algebroid(l: &DiracSpan) -> Result<AlgebroidPresentation> {
    if let Some((i, j, p)) = isotropy_failure(&l.gens) {
        return Err(Error::Precondition(format!("generators {i} and {j} pair to {p}")));
    }
    let n = l.gens.len();
    let ring = l.chart.ring();
    let gb = SubmoduleGb::new(&l.module());
    let mut c = vec![vec![vec![Poly::zero(ring); n]; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let b = courant_bracket(&l.gens[i], &l.gens[j])?;
            let h = gb.coefficients(&b.to_vec()).ok_or_else(|| {
                Error::Inconclusive(format!("bracket of generators {} and {} has no polynomial expansion", i + 1, j + 1))
            })?;
            for k in 0..n {
                c[j][i][k] = -&h[k];
                c[i][j][k] = h[k].clone();
            }
        }
    }
    let anchor = PolyMatrix::from_columns(ring, n, &l.gens.iter().map(|s| s.vector.coeffs().to_vec()).collect::<Vec<_>>())?;
    AlgebroidPresentation::new(&l.chart, anchor, c)
}

/// Supplied structure functions, verified against the Courant bracket.
pub fn verify_structure(l: &DiracSpan, a: &AlgebroidPresentation) -> Result<(bool, AxiomsVerdict)> {
    let n = l.gens.len();
    let mut reproduces = a.rank() == n;
    for i in 0..n {
        for j in 0..n {
            if !reproduces {
                break;
            }
            let b = courant_bracket(&l.gens[i], &l.gens[j])?.to_vec();
            let comb = crate::submodule::combine(l.chart.ring(), 2 * n, &a.structure()[i][j], l.module().generators());
            reproduces = b == comb;
        }
    }
    Ok((reproduces, crate::algebroid::axioms_check(a)))
}

/// Backward image of `L` along `f`.
#[derive(Clone, Debug)]
pub struct BackwardImage {
    pub pullback: PullbackAlgebroid,
    /// `ψ` applied to the generators of `f^!L`.
    pub psi_images: Vec<Section>,
    /// Sections orthogonal to all `ψ` images under the pairing.
    pub closure: SubmodulePresentation,
    /// An `n`-generator presentation of the closure, when one is found.
    pub span: Option<DiracSpan>,
    /// Rank verdict for the closure's generator matrix.
    pub span_rank: Option<RankVerdict>,
}

impl BackwardImage {
    /// `f^!L` is smooth.
    pub fn pullback_smooth(&self) -> bool {
        self.pullback.is_smooth()
    }
}

/// `ψ((a, X)) = (X, f^* sum a_i η_i)`.
pub fn psi(f: &PolyMap, l: &DiracSpan, section: &[Poly]) -> Result<Section> {
    let n = l.gens.len();
    let b = f.source();
    let x = VectorFieldPoly::new(b, section[n..].to_vec())?;
    let mut form = OneFormPoly::zero(b);
    for (i, g) in l.gens.iter().enumerate() {
        if section[i].is_zero() {
            continue;
        }
        let pulled = pullback_form(f, &g.form)?;
        form = form.add(&pulled.scale(&section[i]));
    }
    Section::new(x, form)
}

pub fn backward_image(f: &PolyMap, l: &DiracSpan) -> Result<BackwardImage> {
    f.target().check_same(&l.chart)?;
    let a = underlying_algebroid(l)?;
    let pb = pullback_algebroid(f, &a, &crate::charts::default_samples(f.source().dim()))?;
    let psi_images = pb
        .module
        .sections()
        .generators()
        .iter()
        .map(|s| psi(f, l, s))
        .collect::<Result<Vec<_>>>()?;
    let closure = orthogonal_complement(f.source(), &psi_images)?;
    let (span, span_rank) = match extract_span(f.source(), &closure)? {
        Some(s) => {
            let v = constant_rank_certificate(&s.matrix(), &crate::charts::default_samples(f.source().dim()))?;
            (Some(s), Some(v))
        }
        None => (None, None),
    };
    Ok(BackwardImage {
        pullback: pb,
        psi_images,
        closure,
        span,
        span_rank,
    })
}

/// `{s : ⟨s, p⟩ = 0 for all p}` as a submodule of `R^{2n}`.
pub fn orthogonal_complement(chart: &Chart, sections: &[Section]) -> Result<SubmodulePresentation> {
    let n = chart.dim();
    let ring = chart.ring();
    let mut m = PolyMatrix::zeros(ring, sections.len(), 2 * n);
    for (r, s) in sections.iter().enumerate() {
        for k in 0..n {
            m.set(r, k, s.form.coeffs()[k].clone());
            m.set(r, n + k, s.vector.coeffs()[k].clone());
        }
    }
    preimage_module(&m, &SubmodulePresentation::zero(ring, sections.len()))
}

/// An `n`-element generating set of `module`, tried first on the
/// minimalized generators, then on subsets of the generators.
pub fn extract_span(chart: &Chart, module: &SubmodulePresentation) -> Result<Option<DiracSpan>> {
    let n = chart.dim();
    let min = module.minimalized();
    let to_span = |gens: &[Vec<Poly>]| -> Result<DiracSpan> {
        DiracSpan::new(chart, gens.iter().map(|g| Section::from_vec(chart, g)).collect::<Result<Vec<_>>>()?)
    };
    if min.len() == n {
        return Ok(Some(to_span(min.generators())?));
    }
    if min.len() < n {
        return Ok(None);
    }
    let all = module.without_trivial();
    for subset in combinations(all.len(), n) {
        let gens: Vec<Vec<Poly>> = subset.iter().map(|&i| all.generators()[i].clone()).collect();
        let cand = SubmodulePresentation::new(chart.ring(), 2 * n, gens.clone())?;
        if crate::submodule::contains(&cand, &all)?.holds() {
            return Ok(Some(to_span(&gens)?));
        }
    }
    Ok(None)
}

/// Report on `ψ: f^!L → 𝔅L` being an isomorphism.
#[derive(Clone, Debug)]
pub struct PsiReport {
    /// Transversality of `f` to `F_L`.
    pub hypothesis: RankVerdict,
    /// Vector part of `ψ(ℓ, X)` is `X` on every generator.
    pub anchor_preserved: bool,
    /// Rank verdict for the stacked `ψ` images.
    pub image_rank: RankVerdict,
    /// First generator pair whose bracket is not carried to the Courant
    /// bracket of the images.
    pub bracket_failure: Option<(usize, usize)>,
    /// First sample point where `L ∩ (f_* TB)°` is nonzero.
    pub injectivity_failure: Option<Vec<Rational>>,
    pub injectivity_samples: usize,
}

impl PsiReport {
    pub fn hypothesis_holds(&self, target_dim: usize) -> bool {
        self.hypothesis.is_constant() && self.hypothesis.rank() == target_dim
    }

    pub fn passes(&self, source_dim: usize) -> bool {
        self.anchor_preserved
            && self.image_rank.is_constant()
            && self.image_rank.rank() == source_dim
            && self.bracket_failure.is_none()
            && self.injectivity_failure.is_none()
    }
}

pub fn verify_psi_isomorphism(f: &PolyMap, l: &DiracSpan) -> Result<PsiReport> {
    let b = f.source();
    let samples = crate::charts::default_samples(b.dim());
    let hypothesis = transversality_report(f, &l.foliation(), &samples)?;
    let image = backward_image(f, l)?;
    let gens = image.pullback.module.sections().generators().to_vec();
    let n = l.gens.len();
    let anchor_preserved = gens
        .iter()
        .zip(&image.psi_images)
        .all(|(g, s)| s.vector.coeffs() == &g[n..]);
    let psi_module = SubmodulePresentation::new(b.ring(), 2 * b.dim(), image.psi_images.iter().map(Section::to_vec).collect())?;
    let image_rank = if psi_module.is_empty() {
        constant_rank_certificate(&PolyMatrix::zeros(b.ring(), 2 * b.dim(), 0), &samples)?
    } else {
        constant_rank_certificate(&psi_module.matrix(), &samples)?
    };
    let mut bracket_failure = None;
    'outer: for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            let lhs = psi(f, l, &image.pullback.module.bracket(&gens[i], &gens[j]))?;
            let rhs = courant_bracket(&image.psi_images[i], &image.psi_images[j])?;
            if lhs != rhs {
                bracket_failure = Some((i, j));
                break 'outer;
            }
        }
    }
    let (injectivity_failure, injectivity_samples) = injectivity_check(f, l)?;
    Ok(PsiReport {
        hypothesis,
        anchor_preserved,
        image_rank,
        bracket_failure,
        injectivity_failure,
        injectivity_samples,
    })
}

/// Compare `rank [Y∘f; J_f^T η∘f](q)` with `rank [Y; η](f(q))` on seeded
/// random points `q`.
fn injectivity_check(f: &PolyMap, l: &DiracSpan) -> Result<(Option<Vec<Rational>>, usize)> {
    let b = f.source();
    let jt = jacobian(f).transpose();
    let n = l.gens.len();
    let mut restricted = PolyMatrix::zeros(b.ring(), f.target().dim() + b.dim(), n);
    for (c, g) in l.gens.iter().enumerate() {
        let y = crate::charts::compose_field(f, &g.vector)?;
        let eta: Vec<Poly> = g.form.coeffs().iter().map(|p| f.pull_function(p)).collect::<Result<Vec<_>>>()?;
        let pulled = jt.mul_vec(&eta)?;
        for (r, p) in y.into_iter().chain(pulled).enumerate() {
            restricted.set(r, c, p);
        }
    }
    let full = l.matrix();
    let points = sample::random_points(b.dim(), INJECTIVITY_SAMPLES, 0);
    for q in &points {
        let fq = f.eval(q)?;
        if restricted.rank_at(q)? != full.rank_at(&fq)? {
            return Ok((Some(q.clone()), points.len()));
        }
    }
    Ok((None, points.len()))
}

/// Obstruction to `f_* X ∈ ⟨Y_i ∘ f⟩` read off one component when the
/// composed generators are each supported on a single component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentObstruction {
    pub component: usize,
    /// The component of `f_* X` and the ideal generators on that component.
    pub element: Poly,
    pub ideal: Vec<Poly>,
    /// The same equation with the common monomial factor cancelled, when
    /// the ideal is principal.
    pub reduced_element: Poly,
    pub reduced_ideal: Vec<Poly>,
    pub result: MembershipResult,
}

pub fn component_obstruction(pushed: &[Poly], composed: &SubmodulePresentation) -> Option<ComponentObstruction> {
    let ring = composed.ring();
    let m = composed.ambient_rank();
    let mut per: Vec<Vec<Poly>> = vec![Vec::new(); m];
    for g in composed.generators() {
        let support: Vec<usize> = (0..m).filter(|&k| !g[k].is_zero()).collect();
        match support.as_slice() {
            [] => {}
            [k] => per[*k].push(g[*k].clone()),
            _ => return None,
        }
    }
    for k in 0..m {
        let ideal = SubmodulePresentation::new(ring, 1, per[k].iter().map(|p| vec![p.clone()]).collect()).ok()?;
        let gb = SubmoduleGb::new(&ideal);
        if gb.coefficients(std::slice::from_ref(&pushed[k])).is_some() {
            continue;
        }
        let (reduced_element, reduced_ideal) = match per[k].as_slice() {
            [g] if !pushed[k].is_zero() => {
                let common = pushed[k].monomial_content().gcd(&g.monomial_content());
                let d = Poly::monomial(ring, common, Rational::from_integer(1.into()));
                let g = g.div_exact(&d)?;
                let lc = g.leading_term(crate::algebra::MonomialOrder::GRevLex)?.1.recip();
                (pushed[k].div_exact(&d)?, vec![g.scale(&lc)])
            }
            _ => (pushed[k].clone(), per[k].clone()),
        };
        let reduced = SubmodulePresentation::new(ring, 1, reduced_ideal.iter().map(|p| vec![p.clone()]).collect()).ok()?;
        let result = SubmoduleGb::new(&reduced).membership(std::slice::from_ref(&reduced_element)).ok()?;
        return Some(ComponentObstruction {
            component: k,
            element: pushed[k].clone(),
            ideal: per[k].clone(),
            reduced_element,
            reduced_ideal,
            result,
        });
    }
    None
}

/// The foliation identities around a backward image.
#[derive(Clone, Debug)]
pub struct DiracIdentityReport {
    pub pullback_verdict: RankVerdict,
    /// The Dirac span used for `𝔅L`, computed or supplied.
    pub span: Option<DiracSpan>,
    pub span_check: Option<DiracCheck>,
    pub f_backward: Option<SingularFoliation>,
    pub f_pullback_algebroid: SingularFoliation,
    pub f_preimage: SingularFoliation,
    /// `F_𝔅L` against `F_{f^!L}`.
    pub backward_vs_algebroid: Option<ModuleEquality>,
    /// `f^{-1}(F_L)` against `F_𝔅L`.
    pub preimage_vs_backward: Option<ModuleEquality>,
    /// For a strict containment: `f_* X` of the missing field.
    pub pushed_witness: Option<Vec<Poly>>,
    pub obstruction: Option<ComponentObstruction>,
}

impl DiracIdentityReport {
    pub fn foliations_agree(&self) -> bool {
        self.preimage_vs_backward.as_ref().is_some_and(|e| e.is_equal())
    }

    pub fn strict(&self) -> bool {
        self.preimage_vs_backward.as_ref().is_some_and(|e| e.strictly_smaller())
    }
}

/// `supplied` replaces the computed backward image when given.
pub fn verify_dirac_identities(f: &PolyMap, l: &DiracSpan, supplied: Option<&DiracSpan>) -> Result<DiracIdentityReport> {
    let image = backward_image(f, l)?;
    let span = match supplied {
        Some(s) => {
            f.source().check_same(s.chart())?;
            Some(s.clone())
        }
        None => image.span.clone(),
    };
    let span_check = span.as_ref().map(dirac_check);
    let f_pullback_algebroid = image.pullback.module.induced_foliation();
    let f_preimage = pullback_foliation(f, &l.foliation())?.foliation;
    let f_backward = span.as_ref().map(DiracSpan::foliation);
    let backward_vs_algebroid = match &f_backward {
        Some(fb) => Some(submodule_equal(fb.module(), f_pullback_algebroid.module())?),
        None => None,
    };
    let preimage_vs_backward = match &f_backward {
        Some(fb) => Some(submodule_equal(f_preimage.module(), fb.module())?),
        None => None,
    };
    let mut pushed_witness = None;
    let mut obstruction = None;
    if let Some(eq) = &preimage_vs_backward {
        if let Containment::Missing { element, .. } = &eq.b_in_a {
            let pushed = jacobian(f).mul_vec(element)?;
            obstruction = component_obstruction(&pushed, &composed_generators(f, &l.foliation())?);
            pushed_witness = Some(pushed);
        }
    }
    Ok(DiracIdentityReport {
        pullback_verdict: image.pullback.verdict.clone(),
        span,
        span_check,
        f_backward,
        f_pullback_algebroid,
        f_preimage,
        backward_vs_algebroid,
        preimage_vs_backward,
        pushed_witness,
        obstruction,
    })
}
