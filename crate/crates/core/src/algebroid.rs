//! Lie algebroids trivialized over a chart, their induced foliations, and
//! the pullback algebroid `f^!A = f^*A ×_{TM} TB`.

use std::collections::BTreeMap;

use crate::algebra::{Poly, PolyMatrix, Rational, Ring};
use crate::charts::{constant_rank_certificate, jacobian, Chart, PolyMap, RankVerdict, VectorFieldPoly};
use crate::error::{Error, Result};
use crate::foliation::{pullback_foliation, SingularFoliation};
use crate::submodule::{
    combine, is_zero_vector, preimage_module, submodule_equal, ModuleEquality, SubmoduleGb, SubmodulePresentation,
};

/// Frame `e_1..e_r` with anchor columns `ρ(e_j)` and structure functions
/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidPresentation {
    chart: Chart,
    anchor: PolyMatrix,
    structure: Vec<Vec<Vec<Poly>>>,
}

impl AlgebroidPresentation {
    pub fn new(chart: &Chart, anchor: PolyMatrix, structure: Vec<Vec<Vec<Poly>>>) -> Result<Self> {
        Ring::check_same(chart.ring(), anchor.ring())?;
        if anchor.rows() != chart.dim() {
            return Err(Error::DimensionMismatch(format!(
                "anchor has {} rows on a chart of dimension {}",
                anchor.rows(),
                chart.dim()
            )));
        }
        let r = anchor.cols();
        if structure.len() != r || structure.iter().any(|row| row.len() != r || row.iter().any(|c| c.len() != r)) {
            return Err(Error::MalformedStructure(format!("structure functions must form an {r}x{r}x{r} array")));
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    Ring::check_same(chart.ring(), structure[i][j][k].ring())?;
                    if structure[i][j][k] != -&structure[j][i][k] {
                        return Err(Error::MalformedStructure(format!(
                            "c[{}][{}][{}] is not antisymmetric in the first two indices",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(AlgebroidPresentation {
            chart: chart.clone(),
            anchor,
            structure,
        })
    }

    /// Build from `{(i, j): [c_ij^1, ..]}` with one-based `i < j`; the
    /// remaining entries follow by antisymmetry.
    pub fn from_brackets(chart: &Chart, anchor: PolyMatrix, brackets: &BTreeMap<(usize, usize), Vec<Poly>>) -> Result<Self> {
        let r = anchor.cols();
        let ring = chart.ring();
        let mut c = vec![vec![vec![Poly::zero(ring); r]; r]; r];
        for (&(i, j), v) in brackets {
            if i == 0 || j == 0 || i > r || j > r || i == j || v.len() != r {
                return Err(Error::MalformedStructure(format!("bad bracket entry ({i}, {j})")));
            }
            for k in 0..r {
                c[i - 1][j - 1][k] = v[k].clone();
                c[j - 1][i - 1][k] = -&v[k];
            }
        }
        AlgebroidPresentation::new(chart, anchor, c)
    }

    pub fn tangent(chart: &Chart) -> Self {
        let n = chart.dim();
        AlgebroidPresentation {
            chart: chart.clone(),
            anchor: PolyMatrix::identity(chart.ring(), n),
            structure: vec![vec![vec![Poly::zero(chart.ring()); n]; n]; n],
        }
    }

    pub fn zero_rank(chart: &Chart) -> Self {
        AlgebroidPresentation {
            chart: chart.clone(),
            anchor: PolyMatrix::zeros(chart.ring(), chart.dim(), 0),
            structure: Vec::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.anchor.cols()
    }

    pub fn anchor(&self) -> &PolyMatrix {
        &self.anchor
    }

    pub fn structure(&self) -> &[Vec<Vec<Poly>>] {
        &self.structure
    }

    pub fn anchor_field(&self, j: usize) -> VectorFieldPoly {
        VectorFieldPoly::new(&self.chart, self.anchor.column(j)).expect("anchor column has chart length")
    }

    /// `ρ(a)` for a section `a = sum a_j e_j`.
    pub fn anchor_of(&self, a: &[Poly]) -> VectorFieldPoly {
        let coeffs = self.anchor.mul_vec(a).expect("section has algebroid rank");
        VectorFieldPoly::new(&self.chart, coeffs).expect("anchor image has chart length")
    }

    /// Bracket of sections, by bilinearity and the Leibniz rule.
    pub fn bracket(&self, a: &[Poly], b: &[Poly]) -> Vec<Poly> {
        section_bracket(&self.structure, a, b, &self.anchor_of(a), &self.anchor_of(b))
    }
}

/// `[a, b]` for sections over a frame with structure functions `c`, given
/// the anchors of `a` and `b`.
fn section_bracket(c: &[Vec<Vec<Poly>>], a: &[Poly], b: &[Poly], ra: &VectorFieldPoly, rb: &VectorFieldPoly) -> Vec<Poly> {
    let r = a.len();
    let mut out: Vec<Poly> = (0..r).map(|k| &ra.apply(&b[k]) - &rb.apply(&a[k])).collect();
    for i in 0..r {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..r {
            if b[j].is_zero() {
                continue;
            }
            let ab = &a[i] * &b[j];
            for k in 0..r {
                if !c[i][j][k].is_zero() {
                    out[k] = &out[k] + &(&ab * &c[i][j][k]);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomFailure {
    /// `ρ([e_i, e_j]) - [ρ e_i, ρ e_j]` is nonzero.
    Anchor { pair: (usize, usize), defect: Vec<Poly> },
    /// Nonzero Jacobiator on the frame triple, or on `(e_i, e_j, x_l e_k)`.
    Jacobi {
        triple: (usize, usize, usize),
        coordinate: Option<usize>,
        jacobiator: Vec<Poly>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomsVerdict {
    Verified,
    Failed(Vec<AxiomFailure>),
}

impl AxiomsVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            AxiomsVerdict::Verified => "verified",
            AxiomsVerdict::Failed(_) => "not_verified",
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, AxiomsVerdict::Verified)
    }
}

/// Anchor compatibility on frame pairs and the Jacobi identity on frame
/// triples, also with one entry multiplied by a coordinate so that the
/// Leibniz terms are exercised.
pub fn axioms_check(a: &AlgebroidPresentation) -> AxiomsVerdict {
    let r = a.rank();
    let ring = a.chart.ring();
    let mut failures = Vec::new();
    let frame: Vec<Vec<Poly>> = (0..r).map(|i| crate::submodule::unit_vector(ring, r, i)).collect();
    for i in 0..r {
        for j in (i + 1)..r {
            let lhs = a.anchor_of(&a.structure[i][j]);
            let rhs = a.anchor_field(i).bracket(&a.anchor_field(j));
            let defect: Vec<Poly> = lhs.coeffs().iter().zip(rhs.coeffs()).map(|(x, y)| x - y).collect();
            if !is_zero_vector(&defect) {
                failures.push(AxiomFailure::Anchor { pair: (i, j), defect });
            }
        }
    }
    let jacobiator = |x: &[Poly], y: &[Poly], z: &[Poly]| -> Vec<Poly> {
        let t1 = a.bracket(&a.bracket(x, y), z);
        let t2 = a.bracket(&a.bracket(y, z), x);
        let t3 = a.bracket(&a.bracket(z, x), y);
        (0..r).map(|k| &(&t1[k] + &t2[k]) + &t3[k]).collect()
    };
    for i in 0..r {
        for j in (i + 1)..r {
            for k in 0..r {
                if k > j {
                    let jac = jacobiator(&frame[i], &frame[j], &frame[k]);
                    if !is_zero_vector(&jac) {
                        failures.push(AxiomFailure::Jacobi {
                            triple: (i, j, k),
                            coordinate: None,
                            jacobiator: jac,
                        });
                    }
                }
                for l in 0..a.chart.dim() {
                    let xk: Vec<Poly> = frame[k].iter().map(|p| p * &a.chart.coord(l)).collect();
                    let jac = jacobiator(&frame[i], &frame[j], &xk);
                    if !is_zero_vector(&jac) {
                        failures.push(AxiomFailure::Jacobi {
                            triple: (i, j, k),
                            coordinate: Some(l),
                            jacobiator: jac,
                        });
                    }
                }
            }
        }
    }
    if failures.is_empty() {
        AxiomsVerdict::Verified
    } else {
        AxiomsVerdict::Failed(failures)
    }
}

/// `F_A`, generated by the anchor columns.
pub fn induced_foliation(a: &AlgebroidPresentation) -> SingularFoliation {
    SingularFoliation::new(&a.chart, SubmodulePresentation::column_span(&a.anchor).without_trivial())
        .expect("anchor columns are vector fields on the chart")
}

/// Sections of `f^!A` as pairs `(a, X)` in `R_B^{rank A} ⊕ R_B^{dim B}`
/// with `ρ(a) = f_* X`, anchored by the projection to `X`.
#[derive(Clone, Debug)]
pub struct AnchoredSectionModule {
    map: PolyMap,
    algebroid: AlgebroidPresentation,
    sections: SubmodulePresentation,
    pulled_structure: Vec<Vec<Vec<Poly>>>,
}

impl AnchoredSectionModule {
    pub fn map(&self) -> &PolyMap {
        &self.map
    }

    pub fn algebroid(&self) -> &AlgebroidPresentation {
        &self.algebroid
    }

    pub fn sections(&self) -> &SubmodulePresentation {
        &self.sections
    }

    pub fn algebroid_rank(&self) -> usize {
        self.algebroid.rank()
    }

    /// The `A`-part `a` of a section `(a, X)`.
    pub fn a_part<'s>(&self, s: &'s [Poly]) -> &'s [Poly] {
        &s[..self.algebroid.rank()]
    }

    /// The anchor `X` of a section `(a, X)`.
    pub fn anchor_of(&self, s: &[Poly]) -> VectorFieldPoly {
        VectorFieldPoly::new(self.map.source(), s[self.algebroid.rank()..].to_vec()).expect("second block has source dimension")
    }

    /// Bracket of two sections:
    /// `(sum h_i h'_j c_ij^k∘f e_k + X(h') - X'(h), [X, X'])`.
    pub fn bracket(&self, s: &[Poly], t: &[Poly]) -> Vec<Poly> {
        let x = self.anchor_of(s);
        let y = self.anchor_of(t);
        let mut out = section_bracket(&self.pulled_structure, self.a_part(s), self.a_part(t), &x, &y);
        out.extend(x.bracket(&y).into_coeffs());
        out
    }

    /// `F_{f^!A}`: anchors of the generators.
    pub fn induced_foliation(&self) -> SingularFoliation {
        let gens = self
            .sections
            .generators()
            .iter()
            .map(|g| self.anchor_of(g).into_coeffs())
            .collect();
        let m = SubmodulePresentation::new(self.map.source().ring(), self.map.source().dim(), gens)
            .expect("anchors have source dimension")
            .without_trivial();
        SingularFoliation::new(self.map.source(), m).expect("module of source vector fields")
    }

    /// Defects `ρ(a)∘f - J_f X` of the generators; all zero by construction.
    pub fn fiber_product_defects(&self) -> Vec<Vec<Poly>> {
        let rho = self.map.pull_matrix(self.algebroid.anchor()).expect("anchor on the target");
        let j = jacobian(&self.map);
        self.sections
            .generators()
            .iter()
            .map(|g| {
                let a = rho.mul_vec(self.a_part(g)).expect("rank");
                let b = j.mul_vec(&g[self.algebroid.rank()..]).expect("dim");
                a.iter().zip(&b).map(|(p, q)| p - q).collect()
            })
            .collect()
    }

    /// Whether brackets of all generator pairs lie in the section module.
    /// Returns the first pair that does not, if any.
    pub fn closure_check(&self) -> Option<(usize, usize)> {
        let gb = SubmoduleGb::new(&self.sections);
        let g = self.sections.generators();
        for i in 0..g.len() {
            for j in (i + 1)..g.len() {
                if gb.coefficients(&self.bracket(&g[i], &g[j])).is_none() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// A minimal generating set that is a free basis, when one is found:
    /// the number of generators equals their generic rank.
    pub fn free_basis(&self) -> Option<SubmodulePresentation> {
        let m = self.sections.minimalized();
        let rank = if m.is_empty() { 0 } else { m.matrix().generic_rank() };
        (rank == m.len()).then_some(m)
    }
}

#[derive(Clone, Debug)]
pub struct PullbackAlgebroid {
    pub module: AnchoredSectionModule,
    /// Rank verdict for `[ρ∘f | J_f]`.
    pub verdict: RankVerdict,
}

impl PullbackAlgebroid {
    pub fn is_smooth(&self) -> bool {
        self.verdict.is_constant()
    }
}

/// The matrix `[ρ∘f | J_f]` whose rank governs smoothness of `f^!A`.
pub fn smoothness_matrix(f: &PolyMap, a: &AlgebroidPresentation) -> Result<PolyMatrix> {
    f.target().check_same(&a.chart)?;
    f.pull_matrix(&a.anchor)?.hconcat(&jacobian(f))
}

pub fn pullback_algebroid(f: &PolyMap, a: &AlgebroidPresentation, samples: &[Vec<Rational>]) -> Result<PullbackAlgebroid> {
    f.target().check_same(&a.chart)?;
    let rho = f.pull_matrix(&a.anchor)?;
    let phi = rho.hconcat(&jacobian(f).scale(&Rational::from_integer((-1).into())))?;
    let sections = preimage_module(&phi, &SubmodulePresentation::zero(f.source().ring(), f.target().dim()))?;
    let verdict = constant_rank_certificate(&rho.hconcat(&jacobian(f))?, samples)?;
    let pulled_structure = a
        .structure
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.iter().map(|p| f.pull_function(p)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PullbackAlgebroid {
        module: AnchoredSectionModule {
            map: f.clone(),
            algebroid: a.clone(),
            sections,
            pulled_structure,
        },
        verdict,
    })
}

/// Both sides of `F_{f^!A} = f^{-1}(F_A)`, computed independently.
#[derive(Clone, Debug)]
pub struct PullbackFoliationReport {
    pub hypothesis: RankVerdict,
    pub anchored: SingularFoliation,
    pub pulled_back: SingularFoliation,
    pub equality: ModuleEquality,
}

impl PullbackFoliationReport {
    pub fn hypothesis_holds(&self) -> bool {
        self.hypothesis.is_constant()
    }

    pub fn equal(&self) -> bool {
        self.equality.is_equal()
    }
}

pub fn verify_pullback_foliation_identity(f: &PolyMap, a: &AlgebroidPresentation, samples: &[Vec<Rational>]) -> Result<PullbackFoliationReport> {
    let pb = pullback_algebroid(f, a, samples)?;
    let anchored = pb.module.induced_foliation();
    let pulled_back = pullback_foliation(f, &induced_foliation(a))?.foliation;
    let equality = submodule_equal(anchored.module(), pulled_back.module())?;
    Ok(PullbackFoliationReport {
        hypothesis: pb.verdict,
        anchored,
        pulled_back,
        equality,
    })
}

/// Express `v` over generators, for reporting coefficient witnesses.
pub fn express(v: &[Poly], gens: &SubmodulePresentation) -> Option<Vec<Poly>> {
    let h = SubmoduleGb::new(gens).coefficients(v)?;
    debug_assert_eq!(combine(gens.ring(), gens.ambient_rank(), &h, gens.generators()), v);
    Some(h)
}
