//! Singular foliations as finitely generated modules of polynomial vector
//! fields.

use crate::algebra::{PolyMatrix, Rational};
use crate::charts::{compose_field, constant_rank_certificate, jacobian, Chart, PolyMap, RankVerdict, VectorFieldPoly};
use crate::error::{Error, Result};
use crate::submodule::{preimage_module, MembershipResult, SubmoduleGb, SubmodulePresentation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularFoliation {
    chart: Chart,
    module: SubmodulePresentation,
}

impl SingularFoliation {
    pub fn new(chart: &Chart, module: SubmodulePresentation) -> Result<Self> {
        if !crate::algebra::Ring::same(chart.ring(), module.ring()) || module.ambient_rank() != chart.dim() {
            return Err(Error::DimensionMismatch(format!(
                "module is not a module of vector fields on chart `{}`",
                chart.name()
            )));
        }
        Ok(SingularFoliation {
            chart: chart.clone(),
            module,
        })
    }

    pub fn from_fields(chart: &Chart, fields: &[VectorFieldPoly]) -> Result<Self> {
        let gens = fields.iter().map(|x| x.coeffs().to_vec()).collect();
        SingularFoliation::new(chart, SubmodulePresentation::new(chart.ring(), chart.dim(), gens)?)
    }

    /// Parse generators such as `["d/dx", "x*d/dy"]`.
    pub fn parse<S: AsRef<str>>(chart: &Chart, fields: &[S]) -> Result<Self> {
        let fields = fields
            .iter()
            .map(|s| VectorFieldPoly::parse(chart, s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        SingularFoliation::from_fields(chart, &fields)
    }

    /// All vector fields on the chart.
    pub fn tangent(chart: &Chart) -> Self {
        SingularFoliation {
            chart: chart.clone(),
            module: SubmodulePresentation::free(chart.ring(), chart.dim()),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn module(&self) -> &SubmodulePresentation {
        &self.module
    }

    pub fn fields(&self) -> Vec<VectorFieldPoly> {
        self.module
            .generators()
            .iter()
            .map(|g| VectorFieldPoly::new(&self.chart, g.clone()).expect("generators have chart length"))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvolutivityVerdict {
    Verified,
    NotVerified {
        pair: (usize, usize),
        bracket: VectorFieldPoly,
        result: MembershipResult,
    },
    Inconclusive {
        pair: (usize, usize),
        bracket: VectorFieldPoly,
    },
}

impl InvolutivityVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            InvolutivityVerdict::Verified => "verified",
            InvolutivityVerdict::NotVerified { .. } => "not_verified",
            InvolutivityVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, InvolutivityVerdict::Verified)
    }
}

/// Bracket all generator pairs and test membership. A refuted bracket wins
/// over an inconclusive one.
pub fn involutivity_check(f: &SingularFoliation) -> InvolutivityVerdict {
    let fields = f.fields();
    let gb = SubmoduleGb::new(&f.module);
    let mut pending: Option<InvolutivityVerdict> = None;
    for i in 0..fields.len() {
        for j in (i + 1)..fields.len() {
            let b = fields[i].bracket(&fields[j]);
            if b.is_zero() {
                continue;
            }
            match gb.membership(b.coeffs()).expect("bracket has chart length") {
                MembershipResult::InModule(_) => {}
                result @ MembershipResult::RefutedAtPoint { .. } => {
                    return InvolutivityVerdict::NotVerified {
                        pair: (i, j),
                        bracket: b,
                        result,
                    }
                }
                MembershipResult::NotPolynomialCombination => {
                    pending.get_or_insert(InvolutivityVerdict::Inconclusive { pair: (i, j), bracket: b });
                }
            }
        }
    }
    pending.unwrap_or(InvolutivityVerdict::Verified)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PulledBackFoliation {
    pub foliation: SingularFoliation,
    pub involutivity: InvolutivityVerdict,
}

/// Vector fields `X` on the source with `f_* X = sum h_i (Y_i ∘ f)`.
pub fn pullback_foliation(f: &PolyMap, fol: &SingularFoliation) -> Result<PulledBackFoliation> {
    f.target().check_same(&fol.chart)?;
    let composed = composed_generators(f, fol)?;
    let pre = preimage_module(&jacobian(f), &composed)?;
    let foliation = SingularFoliation::new(f.source(), pre)?;
    let involutivity = involutivity_check(&foliation);
    Ok(PulledBackFoliation { foliation, involutivity })
}

/// The generators `Y_i ∘ f` as a submodule of `f^* T(target)`.
pub fn composed_generators(f: &PolyMap, fol: &SingularFoliation) -> Result<SubmodulePresentation> {
    let gens = fol
        .fields()
        .iter()
        .map(|y| compose_field(f, y))
        .collect::<Result<Vec<_>>>()?;
    SubmodulePresentation::new(f.source().ring(), f.target().dim(), gens)
}

pub fn leaf_dimension_at(fol: &SingularFoliation, point: &[Rational]) -> Result<usize> {
    if point.len() != fol.chart.dim() {
        return Err(Error::ArityMismatch {
            expected: fol.chart.dim(),
            got: point.len(),
        });
    }
    if fol.module.is_empty() {
        return Ok(0);
    }
    fol.module.matrix().rank_at(point)
}

/// Rank verdict for `[generators ∘ f | J_f]`; full target rank everywhere
/// means `f` is transverse to the leaves.
pub fn transversality_report(f: &PolyMap, fol: &SingularFoliation, samples: &[Vec<Rational>]) -> Result<RankVerdict> {
    let m = transversality_matrix(f, fol)?;
    constant_rank_certificate(&m, samples)
}

pub fn transversality_matrix(f: &PolyMap, fol: &SingularFoliation) -> Result<PolyMatrix> {
    f.target().check_same(&fol.chart)?;
    let composed = composed_generators(f, fol)?;
    let g = PolyMatrix::from_columns(f.source().ring(), f.target().dim(), composed.generators())?;
    g.hconcat(&jacobian(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::charts::default_samples;
    use crate::submodule::submodule_equal;

    fn chart(vars: &[&str]) -> Chart {
        Chart::new("M", vars).unwrap()
    }

    #[test]
    fn involutivity_examples() {
        let c = chart(&["x", "y"]);
        assert!(involutivity_check(&SingularFoliation::parse(&c, &["d/dx", "d/dy"]).unwrap()).is_verified());
        assert!(involutivity_check(&SingularFoliation::parse(&c, &["x*d/dx"]).unwrap()).is_verified());
        match involutivity_check(&SingularFoliation::parse(&c, &["d/dx", "x*d/dy"]).unwrap()) {
            InvolutivityVerdict::NotVerified { bracket, result, .. } => {
                assert_eq!(bracket, VectorFieldPoly::parse(&c, "d/dy").unwrap());
                assert!(matches!(result, MembershipResult::RefutedAtPoint { point, .. } if point == vec![rat(0), rat(0)]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pullback_examples() {
        let m = chart(&["x", "y"]);
        let f = SingularFoliation::parse(&m, &["d/dx", "x*d/dy"]).unwrap();
        let id = pullback_foliation(&m.identity_map(), &f).unwrap();
        assert!(submodule_equal(id.foliation.module(), f.module()).unwrap().is_equal());

        let b = chart(&["t"]);
        let diag = PolyMap::parse(&b, &m, "(t) -> (t, t)").unwrap();
        let dx = SingularFoliation::parse(&m, &["d/dx"]).unwrap();
        let pb = pullback_foliation(&diag, &dx).unwrap();
        assert!(pb.foliation.module().is_empty());
        assert!(pb.involutivity.is_verified());

        let bl = chart(&["u", "v"]);
        let p = PolyMap::parse(&bl, &m, "(u, v) -> (u, u*v)").unwrap();
        let full = pullback_foliation(&p, &SingularFoliation::tangent(&m)).unwrap();
        assert!(submodule_equal(full.foliation.module(), SingularFoliation::tangent(&bl).module())
            .unwrap()
            .is_equal());
    }

    #[test]
    fn leaf_dimensions() {
        let m = chart(&["x", "y"]);
        let dx = SingularFoliation::parse(&m, &["d/dx"]).unwrap();
        assert_eq!(leaf_dimension_at(&dx, &[rat(3), rat(-1)]).unwrap(), 1);
        let r = chart(&["x", "y", "z"]);
        let rot = SingularFoliation::parse(&r, &["z*d/dy - y*d/dz", "x*d/dz - z*d/dx", "y*d/dx - x*d/dy"]).unwrap();
        assert_eq!(leaf_dimension_at(&rot, &[rat(1), rat(0), rat(0)]).unwrap(), 2);
        assert_eq!(leaf_dimension_at(&rot, &[rat(0), rat(0), rat(0)]).unwrap(), 0);
        assert!(leaf_dimension_at(&rot, &[rat(0)]).is_err());
    }

    #[test]
    fn transversality_examples() {
        let m = chart(&["x", "y"]);
        let b = chart(&["t"]);
        let dx = SingularFoliation::parse(&m, &["d/dx"]).unwrap();
        let diag = PolyMap::parse(&b, &m, "(t) -> (t, t)").unwrap();
        let v = transversality_report(&diag, &dx, &default_samples(1)).unwrap();
        assert!(v.is_constant() && v.rank() == 2);
        let axis = PolyMap::parse(&b, &m, "(t) -> (t, 0)").unwrap();
        let v = transversality_report(&axis, &dx, &default_samples(1)).unwrap();
        assert!(v.is_constant() && v.rank() == 1);
    }
}
