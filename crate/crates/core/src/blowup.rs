//! Projective blowups of affine space along coordinate subspaces.
//!
//! The center is `N = {x_{k+1} = ... = x_n = 0}`. Chart `j` (one per normal
//! coordinate) has variables `(x_1..x_k, u, v_l)` and blowdown `x_j = u`,
//! `x_l = u v_l`. The exceptional divisor is `{u = 0}` in every chart.
//!
//! Adapted sections `Γ(A,C)` are generated by `x_j e_l` for normal `j` together
//! with the normally constant extensions of the generators of `C`. A section
//! whose restriction to `N` is `sum h_i c_i` differs from `sum ext(h_i) ext(c_i)`
//! by a section vanishing on `N`, and such sections lie in the ideal part.

use std::fmt;

use crate::algebra::{PolyMatrix, Poly, QMatrix, Rational, RationalFunction, Ring, RingRef};
use crate::algebroid::{induced_foliation, AlgebroidPresentation};
use crate::charts::{compose_field, constant_rank_certificate, default_samples, jacobian, Chart, PolyMap, RankVerdict, VectorFieldPoly};
use crate::error::{Error, Result};
use crate::foliation::{involutivity_check, pullback_foliation, transversality_report, InvolutivityVerdict, SingularFoliation};
use crate::sample::random_points;
use crate::submodule::{contains, preimage_module, submodule_equal, submodule_intersection, unit_vector, Containment, ModuleEquality, SubmodulePresentation};

pub const OVERLAP_SAMPLES: usize = 25;

fn ambient_names(n: usize) -> Vec<String> {
    match n {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

#[derive(Clone, Debug)]
pub struct BlowupChart {
    chart: Chart,
    normal: usize,
    blowdown: PolyMap,
}

impl BlowupChart {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Ambient index of the coordinate that becomes `u`.
    pub fn normal_index(&self) -> usize {
        self.normal
    }

    pub fn blowdown(&self) -> &PolyMap {
        &self.blowdown
    }
}

/// Change of coordinates from chart `from` to chart `to`, as rational
/// functions on `from`.
#[derive(Clone, Debug)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub components: Vec<RationalFunction>,
}

impl Transition {
    pub fn eval(&self, point: &[Rational]) -> Result<Option<Vec<Rational>>> {
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            match c.eval(point)? {
                Some(v) => out.push(v),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    pub fn jacobian(&self) -> Vec<Vec<RationalFunction>> {
        let n = self.components.len();
        self.components.iter().map(|c| (0..n).map(|i| c.derivative(i)).collect()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct BlowupAtlas {
    ambient: Chart,
    center: Chart,
    codim: usize,
    charts: Vec<BlowupChart>,
    transitions: Vec<Transition>,
}

pub fn blowup_atlas(n: usize, codim: usize) -> Result<BlowupAtlas> {
    if codim == 0 || codim > n {
        return Err(Error::CodimOutOfRange { dim: n, codim });
    }
    let names = ambient_names(n);
    let ambient = Chart::new("M", &names)?;
    let k = n - codim;
    let center = Chart::new("N", &names[..k])?;
    let mut charts = Vec::with_capacity(codim);
    for j in k..n {
        let mut vars: Vec<String> = names[..k].to_vec();
        vars.push("u".into());
        for l in (k..n).filter(|&l| l != j) {
            vars.push(if codim == 2 { "v".into() } else { format!("v{}", names[l]) });
        }
        let chart = Chart::new(&format!("U{}", names[j]), &vars)?;
        let u = chart.coord(k);
        let mut comps: Vec<Poly> = (0..k).map(|i| chart.coord(i)).collect();
        let mut fiber = k + 1;
        for l in k..n {
            if l == j {
                comps.push(u.clone());
            } else {
                comps.push(&u * &chart.coord(fiber));
                fiber += 1;
            }
        }
        let blowdown = PolyMap::new(&chart, &ambient, comps)?;
        charts.push(BlowupChart { chart, normal: j, blowdown });
    }
    let mut transitions = Vec::new();
    for a in 0..codim {
        for b in 0..codim {
            if a != b {
                transitions.push(transition(&charts, k, a, b)?);
            }
        }
    }
    Ok(BlowupAtlas {
        ambient,
        center,
        codim,
        charts,
        transitions,
    })
}

fn transition(charts: &[BlowupChart], k: usize, a: usize, b: usize) -> Result<Transition> {
    let src = &charts[a];
    let ring = src.chart.ring();
    let n = src.chart.dim();
    let poly = |p: Poly| RationalFunction::from_poly(p);
    // ambient coordinates as functions on chart a
    let ambient: Vec<RationalFunction> = src.blowdown.components().iter().cloned().map(poly).collect();
    let j = charts[b].normal;
    let xj = ambient[j].clone();
    let mut comps: Vec<RationalFunction> = (0..k).map(|i| poly(Poly::var(ring, i))).collect();
    comps.push(xj.clone());
    let inv = xj.recip()?;
    for l in (k..n).filter(|&l| l != j) {
        comps.push(ambient[l].mul(&inv));
    }
    Ok(Transition {
        from: a,
        to: b,
        components: comps,
    })
}

impl BlowupAtlas {
    pub fn ambient(&self) -> &Chart {
        &self.ambient
    }

    pub fn center(&self) -> &Chart {
        &self.center
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn center_dim(&self) -> usize {
        self.center.dim()
    }

    /// Index of `u` in every chart.
    pub fn divisor_var(&self) -> usize {
        self.center_dim()
    }

    pub fn charts(&self) -> &[BlowupChart] {
        &self.charts
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, from: usize, to: usize) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.from == from && t.to == to)
    }

    /// The inclusion `N -> M`.
    pub fn inclusion(&self) -> PolyMap {
        let k = self.center_dim();
        let comps = (0..self.ambient_dim())
            .map(|i| if i < k { self.center.coord(i) } else { Poly::zero(self.center.ring()) })
            .collect();
        PolyMap::new(&self.center, &self.ambient, comps).expect("inclusion components match")
    }

    /// Restriction `x_i -> x_i (i < k)`, `x_l -> 0` from the ambient ring to the center ring.
    pub fn restrict_to_center(&self, p: &Poly) -> Result<Poly> {
        self.inclusion().pull_function(p)
    }

    /// The normally constant extension of a function on the center.
    pub fn extend_from_center(&self, p: &Poly) -> Poly {
        let map: Vec<usize> = (0..self.center_dim()).collect();
        p.embed(self.ambient.ring(), &map)
    }

    /// Pairs `(from, to)` for which `p_from = p_to ∘ τ` fails after clearing
    /// denominators.
    pub fn transition_failures(&self) -> Result<Vec<(usize, usize)>> {
        let mut bad = Vec::new();
        for t in &self.transitions {
            let src = &self.charts[t.from];
            let dst = &self.charts[t.to];
            for (pi, pj) in src.blowdown.components().iter().zip(dst.blowdown.components()) {
                let composed = RationalFunction::substitute_into(pj, &t.components, src.chart.ring())?;
                if !composed.equals(&RationalFunction::from_poly(pi.clone())) {
                    bad.push((t.from, t.to));
                    break;
                }
            }
        }
        Ok(bad)
    }

    /// For each transition, the factor `u'/u` and points of the overlap where it
    /// is positive and negative. A sign change for every pair means the normal
    /// line bundle of the divisor admits no consistent orientation from these
    /// charts.
    pub fn mobius_check(&self) -> Result<Vec<MobiusWitness>> {
        let k = self.divisor_var();
        let mut out = Vec::new();
        for t in &self.transitions {
            let ring = self.charts[t.from].chart.ring();
            let u = RationalFunction::from_poly(Poly::var(ring, k));
            let factor = t.components[k].mul(&u.recip()?);
            let det = RationalFunction::det(&t.jacobian(), ring);
            let mut positive = None;
            let mut negative = None;
            let n = ring.nvars();
            for p in crate::sample::grid_points(n).into_iter().chain(random_points(n, 16, 0)) {
                if num_traits::Zero::is_zero(&p[k]) {
                    continue;
                }
                let Some(val) = factor.eval(&p)? else { continue };
                if t.eval(&p)?.is_none() {
                    continue;
                }
                if num_traits::Signed::is_positive(&val) && positive.is_none() {
                    positive = Some(p);
                } else if num_traits::Signed::is_negative(&val) && negative.is_none() {
                    negative = Some(p);
                }
                if positive.is_some() && negative.is_some() {
                    break;
                }
            }
            out.push(MobiusWitness {
                from: t.from,
                to: t.to,
                factor,
                jacobian_det: det,
                positive,
                negative,
            });
        }
        Ok(out)
    }

    pub fn chart_names(&self) -> Vec<String> {
        self.charts.iter().map(|c| c.chart.name().to_string()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct MobiusWitness {
    pub from: usize,
    pub to: usize,
    pub factor: RationalFunction,
    pub jacobian_det: RationalFunction,
    pub positive: Option<Vec<Rational>>,
    pub negative: Option<Vec<Rational>>,
}

impl MobiusWitness {
    pub fn changes_sign(&self) -> bool {
        self.positive.is_some() && self.negative.is_some()
    }
}

/// The unique vector field on `chart` that is `p`-related to `y`.
pub fn lift_in_chart(chart: &BlowupChart, y: &VectorFieldPoly) -> Result<VectorFieldPoly> {
    let p = &chart.blowdown;
    let rhs = compose_field(p, y)?;
    let (nums, det) = jacobian(p).cramer(&rhs)?;
    let mut coeffs = Vec::with_capacity(nums.len());
    for (i, num) in nums.iter().enumerate() {
        let (q, r) = num.div_rem(&det);
        if !r.is_zero() {
            return Err(Error::NotTangentToCenter {
                chart: chart.chart.name().to_string(),
                component: format!("d/d{}", chart.chart.vars()[i]),
                remainder: RationalFunction::new(num.clone(), det.clone())?.to_string(),
            });
        }
        coeffs.push(q);
    }
    VectorFieldPoly::new(&chart.chart, coeffs)
}

/// Per-chart lifts of `y`.
pub fn lift_vector_field(atlas: &BlowupAtlas, y: &VectorFieldPoly) -> Result<Vec<VectorFieldPoly>> {
    Ring::check_same(atlas.ambient.ring(), y.ring())?;
    atlas.charts.iter().map(|c| lift_in_chart(c, y)).collect()
}

/// Whether the lift of `[y1, y2]` equals the bracket of the lifts in every chart.
pub fn lift_bracket_check(atlas: &BlowupAtlas, y1: &VectorFieldPoly, y2: &VectorFieldPoly) -> Result<bool> {
    let l1 = lift_vector_field(atlas, y1)?;
    let l2 = lift_vector_field(atlas, y2)?;
    let l12 = lift_vector_field(atlas, &y1.bracket(y2))?;
    Ok(l1.iter().zip(&l2).zip(&l12).all(|((a, b), c)| a.bracket(b) == *c))
}

/// One module of vector fields per chart of an atlas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartwiseModule {
    charts: Vec<Chart>,
    modules: Vec<SubmodulePresentation>,
}

impl ChartwiseModule {
    pub fn new(atlas: &BlowupAtlas, modules: Vec<SubmodulePresentation>) -> Result<Self> {
        if modules.len() != atlas.charts.len() {
            return Err(Error::LengthMismatch {
                expected: atlas.charts.len(),
                got: modules.len(),
            });
        }
        let charts: Vec<Chart> = atlas.charts.iter().map(|c| c.chart.clone()).collect();
        for (c, m) in charts.iter().zip(&modules) {
            Ring::check_same(c.ring(), m.ring())?;
            if m.ambient_rank() != c.dim() {
                return Err(Error::DimensionMismatch(format!("module on chart `{}` has wrong rank", c.name())));
            }
        }
        Ok(ChartwiseModule { charts, modules })
    }

    fn from_fields(atlas: &BlowupAtlas, fields: Vec<Vec<VectorFieldPoly>>) -> Result<Self> {
        let modules = atlas
            .charts
            .iter()
            .zip(fields)
            .map(|(c, fs)| SubmodulePresentation::new(c.chart.ring(), c.chart.dim(), fs.into_iter().map(|f| f.into_coeffs()).collect()))
            .collect::<Result<Vec<_>>>()?;
        ChartwiseModule::new(atlas, modules)
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn modules(&self) -> &[SubmodulePresentation] {
        &self.modules
    }

    pub fn module(&self, chart: usize) -> &SubmodulePresentation {
        &self.modules[chart]
    }

    pub fn foliation(&self, chart: usize) -> SingularFoliation {
        SingularFoliation::new(&self.charts[chart], self.modules[chart].clone()).expect("validated on construction")
    }

    pub fn involutivity(&self) -> Vec<InvolutivityVerdict> {
        (0..self.charts.len()).map(|i| involutivity_check(&self.foliation(i))).collect()
    }

    pub fn contained_in(&self, other: &ChartwiseModule) -> Result<Vec<Containment>> {
        self.modules.iter().zip(&other.modules).map(|(a, b)| contains(b, a)).collect()
    }

    pub fn equality(&self, other: &ChartwiseModule) -> Result<Vec<ModuleEquality>> {
        self.modules.iter().zip(&other.modules).map(|(a, b)| submodule_equal(a, b)).collect()
    }

    pub fn intersect(&self, other: &ChartwiseModule) -> Result<ChartwiseModule> {
        let modules = self
            .modules
            .iter()
            .zip(&other.modules)
            .map(|(a, b)| submodule_intersection(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChartwiseModule {
            charts: self.charts.clone(),
            modules,
        })
    }

    /// Push each generator through every transition at sampled overlap points and
    /// test pointwise membership in the target chart's span.
    pub fn overlap_check(&self, atlas: &BlowupAtlas, samples: usize) -> Result<OverlapReport> {
        let mut report = OverlapReport {
            points_checked: 0,
            failures: Vec::new(),
        };
        for t in &atlas.transitions {
            let n = self.charts[t.from].dim();
            let jac = t.jacobian();
            let mut checked = 0;
            for p in random_points(n, samples * 4, 7 + t.from as u64 * 31 + t.to as u64) {
                if checked == samples {
                    break;
                }
                let Some(q) = t.eval(&p)? else { continue };
                let Some(j) = eval_rational_matrix(&jac, &p)? else { continue };
                checked += 1;
                let target = &self.modules[t.to];
                let cols: Vec<Vec<Rational>> = target
                    .generators()
                    .iter()
                    .map(|g| g.iter().map(|c| c.eval(&q)).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?;
                let span = QMatrix::new((0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect(), cols.len());
                for (gi, g) in self.modules[t.from].generators().iter().enumerate() {
                    let x: Vec<Rational> = g.iter().map(|c| c.eval(&p)).collect::<Result<_>>()?;
                    let pushed = j.mul_vec(&x);
                    if span.cols == 0 {
                        if pushed.iter().any(|v| !num_traits::Zero::is_zero(v)) {
                            report.failures.push(OverlapFailure {
                                from: t.from,
                                to: t.to,
                                generator: gi,
                                point: p.clone(),
                            });
                        }
                    } else if span.solve(&pushed).is_none() {
                        report.failures.push(OverlapFailure {
                            from: t.from,
                            to: t.to,
                            generator: gi,
                            point: p.clone(),
                        });
                    }
                }
            }
            report.points_checked += checked;
        }
        Ok(report)
    }
}

fn eval_rational_matrix(m: &[Vec<RationalFunction>], p: &[Rational]) -> Result<Option<QMatrix>> {
    let mut data = Vec::with_capacity(m.len());
    for row in m {
        let mut r = Vec::with_capacity(row.len());
        for f in row {
            match f.eval(p)? {
                Some(v) => r.push(v),
                None => return Ok(None),
            }
        }
        data.push(r);
    }
    let cols = m.first().map_or(0, |r| r.len());
    Ok(Some(QMatrix::new(data, cols)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapFailure {
    pub from: usize,
    pub to: usize,
    pub generator: usize,
    pub point: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapReport {
    pub points_checked: usize,
    pub failures: Vec<OverlapFailure>,
}

impl OverlapReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ChartwiseModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, m)) in self.charts.iter().zip(&self.modules).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let gens: Vec<String> = m.generators().iter().map(|g| crate::charts::fmt_linear(c.ring(), g, "d/d")).collect();
            write!(f, "{}: <{}>", c.name(), gens.join(", "))?;
        }
        Ok(())
    }
}

fn scaled_unit(ring: &RingRef, n: usize, w: usize, factor: &Poly) -> Vec<Poly> {
    let mut v = unit_vector(ring, n, w);
    v[w] = factor.clone();
    v
}

/// Vector fields tangent to the divisor: `u d/du` and `d/dw` for `w != u`.
pub fn b_tangent_module(atlas: &BlowupAtlas) -> ChartwiseModule {
    let k = atlas.divisor_var();
    let modules = atlas
        .charts
        .iter()
        .map(|c| {
            let ring = c.chart.ring();
            let n = c.chart.dim();
            let gens = (0..n)
                .map(|w| if w == k { scaled_unit(ring, n, w, &c.chart.coord(k)) } else { unit_vector(ring, n, w) })
                .collect();
            SubmodulePresentation::new(ring, n, gens).expect("unit generators")
        })
        .collect();
    ChartwiseModule::new(atlas, modules).expect("chart modules")
}

/// Vector fields tangent on the divisor to the fibers over the center:
/// `u d/dx_i` for base directions, `u d/du`, `d/dv_l`.
pub fn edge_module(atlas: &BlowupAtlas) -> ChartwiseModule {
    let k = atlas.divisor_var();
    let modules = atlas
        .charts
        .iter()
        .map(|c| {
            let ring = c.chart.ring();
            let n = c.chart.dim();
            let u = c.chart.coord(k);
            let gens = (0..n)
                .map(|w| if w <= k { scaled_unit(ring, n, w, &u) } else { unit_vector(ring, n, w) })
                .collect();
            SubmodulePresentation::new(ring, n, gens).expect("unit generators")
        })
        .collect();
    ChartwiseModule::new(atlas, modules).expect("chart modules")
}

/// How a subalgebroid over the center is specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubalgebroidSpec {
    Zero,
    /// `ker(ρ|_N)`.
    Kernel,
    /// The restricted algebroid `ι^! A = {a : ρ(a) ∈ TN}`.
    FullRestriction,
    /// Generators in the rank-`r` free module over the center ring.
    Explicit(SubmodulePresentation),
}

impl SubalgebroidSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            SubalgebroidSpec::Zero => "zero",
            SubalgebroidSpec::Kernel => "kernel",
            SubalgebroidSpec::FullRestriction => "full_restriction",
            SubalgebroidSpec::Explicit(_) => "explicit",
        }
    }
}

fn check_ambient(a: &AlgebroidPresentation, atlas: &BlowupAtlas) -> Result<()> {
    atlas.ambient.check_same(a.chart())
}

/// The anchor restricted to the center, over the center ring.
pub fn anchor_on_center(a: &AlgebroidPresentation, atlas: &BlowupAtlas) -> Result<PolyMatrix> {
    check_ambient(a, atlas)?;
    atlas.inclusion().pull_matrix(a.anchor())
}

pub fn anchor_kernel_on_center(a: &AlgebroidPresentation, atlas: &BlowupAtlas) -> Result<SubmodulePresentation> {
    let rho = anchor_on_center(a, atlas)?;
    let zero = SubmodulePresentation::zero(atlas.center.ring(), rho.rows());
    Ok(preimage_module(&rho, &zero)?.minimalized())
}

pub fn restricted_algebroid(a: &AlgebroidPresentation, atlas: &BlowupAtlas) -> Result<SubmodulePresentation> {
    let rho = anchor_on_center(a, atlas)?;
    let k = atlas.center_dim();
    let normal_rows: Vec<usize> = (k..rho.rows()).collect();
    let all_cols: Vec<usize> = (0..rho.cols()).collect();
    let normal = rho.select(&normal_rows, &all_cols);
    let zero = SubmodulePresentation::zero(atlas.center.ring(), normal.rows());
    Ok(preimage_module(&normal, &zero)?.minimalized())
}

pub fn resolve_subalgebroid(a: &AlgebroidPresentation, atlas: &BlowupAtlas, spec: &SubalgebroidSpec) -> Result<SubmodulePresentation> {
    check_ambient(a, atlas)?;
    match spec {
        SubalgebroidSpec::Zero => Ok(SubmodulePresentation::zero(atlas.center.ring(), a.rank())),
        SubalgebroidSpec::Kernel => anchor_kernel_on_center(a, atlas),
        SubalgebroidSpec::FullRestriction => restricted_algebroid(a, atlas),
        SubalgebroidSpec::Explicit(c) => {
            Ring::check_same(atlas.center.ring(), c.ring())?;
            if c.ambient_rank() != a.rank() {
                return Err(Error::DimensionMismatch(format!(
                    "subalgebroid has rank {} but the algebroid has rank {}",
                    c.ambient_rank(),
                    a.rank()
                )));
            }
            Ok(c.clone())
        }
    }
}

/// Whether `ker(ρ|_N) ⊆ C`.
pub fn kernel_containment(a: &AlgebroidPresentation, c: &SubmodulePresentation, atlas: &BlowupAtlas) -> Result<Containment> {
    let ker = anchor_kernel_on_center(a, atlas)?;
    contains(c, &ker)
}

fn require_kernel_containment(a: &AlgebroidPresentation, c: &SubmodulePresentation, atlas: &BlowupAtlas) -> Result<()> {
    match kernel_containment(a, c, atlas)? {
        Containment::Contained(_) => Ok(()),
        Containment::Missing { element, result, .. } => Err(Error::Precondition(format!(
            "anchor kernel element {} over the center is not in C ({})",
            crate::submodule::fmt_vector(&element),
            result.tag()
        ))),
    }
}

/// Sections of `A` whose restriction to the center lies in `C`.
pub fn sections_adapted(a: &AlgebroidPresentation, c: &SubmodulePresentation, atlas: &BlowupAtlas) -> Result<SubmodulePresentation> {
    require_kernel_containment(a, c, atlas)?;
    adapted_generators(a, c, atlas)
}

fn adapted_generators(a: &AlgebroidPresentation, c: &SubmodulePresentation, atlas: &BlowupAtlas) -> Result<SubmodulePresentation> {
    Ring::check_same(atlas.center.ring(), c.ring())?;
    let ring = atlas.ambient.ring();
    let r = a.rank();
    let mut gens = Vec::new();
    for g in c.without_trivial().generators() {
        gens.push(g.iter().map(|p| atlas.extend_from_center(p)).collect());
    }
    for j in atlas.center_dim()..atlas.ambient_dim() {
        for l in 0..r {
            gens.push(scaled_unit(ring, r, l, &Poly::var(ring, j)));
        }
    }
    SubmodulePresentation::new(ring, r, gens)
}

/// Lifts of `ρ(s)` for the generators `s` of `Γ(A,C)`.
pub fn blup_foliation_base(a: &AlgebroidPresentation, c: &SubmodulePresentation, atlas: &BlowupAtlas) -> Result<ChartwiseModule> {
    let sections = sections_adapted(a, c, atlas)?;
    let mut per_chart: Vec<Vec<VectorFieldPoly>> = vec![Vec::new(); atlas.charts.len()];
    for s in sections.generators() {
        let y = a.anchor_of(s);
        if y.is_zero() {
            continue;
        }
        for (i, chart) in atlas.charts.iter().enumerate() {
            let lift = lift_in_chart(chart, &y).map_err(|e| {
                Error::Precondition(format!("anchor of an adapted section does not lift ({e}); C is not a subalgebroid over the center"))
            })?;
            per_chart[i].push(lift);
        }
    }
    ChartwiseModule::from_fields(atlas, per_chart)
}

/// `p^{-1}(F_A)` in every chart.
pub fn pullback_module(a: &AlgebroidPresentation, atlas: &BlowupAtlas) -> Result<ChartwiseModule> {
    check_ambient(a, atlas)?;
    let fa = induced_foliation(a);
    let modules = atlas
        .charts
        .iter()
        .map(|c| Ok(pullback_foliation(&c.blowdown, &fa)?.foliation.module().clone()))
        .collect::<Result<Vec<_>>>()?;
    ChartwiseModule::new(atlas, modules)
}

/// Vector fields whose restriction to the divisor lies in `π_ℙ^{-1}(ρ(C))`.
pub fn e_c_module(a: &AlgebroidPresentation, c: &SubmodulePresentation, atlas: &BlowupAtlas) -> Result<ChartwiseModule> {
    let rho = anchor_on_center(a, atlas)?;
    let k = atlas.center_dim();
    let n = atlas.ambient_dim();
    let image = c.image(&rho)?;
    let mut tangential = Vec::new();
    for v in image.without_trivial().generators() {
        if v[k..].iter().any(|p| !p.is_zero()) {
            return Err(Error::Precondition(format!(
                "ρ(C) contains {} which is not tangent to the center",
                crate::submodule::fmt_vector(v)
            )));
        }
        tangential.push(v[..k].to_vec());
    }
    let mut modules = Vec::with_capacity(atlas.charts.len());
    for chart in &atlas.charts {
        let ring = chart.chart.ring();
        let u = chart.chart.coord(k);
        // divisor coordinates: chart variables without u
        let pvars: Vec<String> = chart.chart.vars().iter().enumerate().filter(|&(i, _)| i != k).map(|(_, v)| v.clone()).collect();
        let pring = Ring::new(&pvars)?;
        let base_map: Vec<usize> = (0..k).collect();
        let into_chart: Vec<usize> = (0..n - 1).map(|i| if i < k { i } else { i + 1 }).collect();
        let fiberwise = if k == 0 {
            SubmodulePresentation::free(&pring, n - 1)
        } else {
            let target = SubmodulePresentation::new(
                &pring,
                k,
                tangential.iter().map(|v| v.iter().map(|p| p.embed(&pring, &base_map)).collect()).collect(),
            )?;
            let mut proj = PolyMatrix::zeros(&pring, k, n - 1);
            for i in 0..k {
                proj.set(i, i, Poly::one(&pring));
            }
            preimage_module(&proj, &target)?
        };
        let mut gens: Vec<Vec<Poly>> = (0..n).map(|w| scaled_unit(ring, n, w, &u)).collect();
        for g in fiberwise.without_trivial().generators() {
            let mut v: Vec<Poly> = g.iter().map(|p| p.embed(ring, &into_chart)).collect();
            v.insert(k, Poly::zero(ring));
            gens.push(v);
        }
        modules.push(SubmodulePresentation::new(ring, n, gens)?);
    }
    ChartwiseModule::new(atlas, modules)
}

/// Transversality of the center to the anchor.
pub fn center_transversality(a: &AlgebroidPresentation, atlas: &BlowupAtlas) -> Result<RankVerdict> {
    check_ambient(a, atlas)?;
    transversality_report(&atlas.inclusion(), &induced_foliation(a), &default_samples(atlas.center_dim()))
}

/// `p^{-1}(F_A) ∩ E_C`.
pub fn blup_foliation_intersection(a: &AlgebroidPresentation, c: &SubmodulePresentation, atlas: &BlowupAtlas) -> Result<ChartwiseModule> {
    require_kernel_containment(a, c, atlas)?;
    let verdict = center_transversality(a, atlas)?;
    if !(verdict.is_constant() && verdict.rank() == atlas.ambient_dim()) {
        return Err(Error::Precondition(format!("the center is not a transversal of the algebroid: {verdict}")));
    }
    pullback_module(a, atlas)?.intersect(&e_c_module(a, c, atlas)?)
}

#[derive(Clone, Debug)]
pub struct BlupReport {
    pub base: ChartwiseModule,
    pub intersection: ChartwiseModule,
    pub equality: Vec<ModuleEquality>,
    /// Comparison with `p^{-1}(F_A) ∩ Γ(T^b B)` when `C = ι^! A`.
    pub restricted_formula: Option<Vec<ModuleEquality>>,
    /// Rank verdict of `ρ|_N` when `C = ker(ρ|_N)`.
    pub isotropy_rank: Option<RankVerdict>,
    /// Comparison with `p^{-1}(F_A) ∩ Γ(E)` when `C = ker(ρ|_N)` of constant rank.
    pub isotropy_formula: Option<Vec<ModuleEquality>>,
    pub divisor_tangency: Vec<Containment>,
    pub overlap: OverlapReport,
    pub involutivity: Vec<InvolutivityVerdict>,
}

impl BlupReport {
    pub fn equal(&self) -> bool {
        self.equality.iter().all(|e| e.is_equal())
    }

    pub fn passes(&self) -> bool {
        let formula_ok = |f: &Option<Vec<ModuleEquality>>| f.as_ref().is_none_or(|v| v.iter().all(|e| e.is_equal()));
        self.equal()
            && formula_ok(&self.restricted_formula)
            && formula_ok(&self.isotropy_formula)
            && self.divisor_tangency.iter().all(|c| c.holds())
            && self.overlap.passes()
            && self.involutivity.iter().all(|v| v.is_verified())
    }
}

/// Compute `F_Blup` both ways and compare chart by chart.
pub fn verify_blup_identities(a: &AlgebroidPresentation, c: &SubmodulePresentation, atlas: &BlowupAtlas) -> Result<BlupReport> {
    let base = blup_foliation_base(a, c, atlas)?;
    let intersection = blup_foliation_intersection(a, c, atlas)?;
    let equality = base.equality(&intersection)?;
    let pulled = pullback_module(a, atlas)?;
    let restricted_formula = if submodule_equal(c, &restricted_algebroid(a, atlas)?)?.is_equal() {
        Some(intersection.equality(&pulled.intersect(&b_tangent_module(atlas))?)?)
    } else {
        None
    };
    let (isotropy_rank, isotropy_formula) = if submodule_equal(c, &anchor_kernel_on_center(a, atlas)?)?.is_equal() {
        let rho = anchor_on_center(a, atlas)?;
        let verdict = constant_rank_certificate(&rho, &default_samples(atlas.center_dim()))?;
        let formula = if verdict.is_constant() {
            Some(intersection.equality(&pulled.intersect(&edge_module(atlas))?)?)
        } else {
            None
        };
        (Some(verdict), formula)
    } else {
        (None, None)
    };
    let divisor_tangency = intersection.contained_in(&b_tangent_module(atlas))?;
    let overlap = intersection.overlap_check(atlas, OVERLAP_SAMPLES)?;
    let involutivity = intersection.involutivity();
    Ok(BlupReport {
        base,
        intersection,
        equality,
        restricted_formula,
        isotropy_rank,
        isotropy_formula,
        divisor_tangency,
        overlap,
        involutivity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn field(c: &Chart, s: &str) -> VectorFieldPoly {
        VectorFieldPoly::parse(c, s).unwrap()
    }

    fn module(c: &Chart, fields: &[&str]) -> SubmodulePresentation {
        SingularFoliation::parse(c, fields).unwrap().module().clone()
    }

    #[test]
    fn standard_charts() {
        let at = blowup_atlas(2, 2).unwrap();
        assert_eq!(at.charts().len(), 2);
        let c0 = &at.charts()[0];
        let c1 = &at.charts()[1];
        assert_eq!(c0.chart().vars(), &["u", "v"]);
        assert_eq!(c0.blowdown().to_string(), PolyMap::parse(c0.chart(), at.ambient(), "(u, v) -> (u, u*v)").unwrap().to_string());
        assert_eq!(c1.blowdown().to_string(), PolyMap::parse(c1.chart(), at.ambient(), "(u, v) -> (u*v, u)").unwrap().to_string());
        let t = at.transition(0, 1).unwrap();
        let r = c0.chart().ring();
        assert_eq!(t.components[0].as_poly(), Some(Poly::parse(r, "u*v").unwrap()));
        assert_eq!(t.components[1], RationalFunction::new(Poly::one(r), Poly::parse(r, "v").unwrap()).unwrap());
        assert!(at.transition_failures().unwrap().is_empty());

        let line = blowup_atlas(3, 2).unwrap();
        assert_eq!(line.charts()[0].chart().vars(), &["x", "u", "v"]);
        assert_eq!(line.charts()[0].blowdown().components()[2].to_string(), "u*v");
        assert_eq!(line.charts()[1].blowdown().components()[1].to_string(), "u*v");
        assert!(line.transition_failures().unwrap().is_empty());

        let hyper = blowup_atlas(2, 1).unwrap();
        assert_eq!(hyper.charts().len(), 1);
        assert!(hyper.transitions().is_empty());
        let p = hyper.charts()[0].blowdown();
        assert_eq!(p.eval(&[rat(2), rat(-3)]).unwrap(), vec![rat(2), rat(-3)]);
        assert!(jacobian(p).det().is_constant());

        assert!(matches!(blowup_atlas(2, 0), Err(Error::CodimOutOfRange { .. })));
        assert!(matches!(blowup_atlas(2, 3), Err(Error::CodimOutOfRange { .. })));
    }

    #[test]
    fn point_center_in_three_space() {
        let at = blowup_atlas(3, 3).unwrap();
        assert_eq!(at.charts()[1].chart().vars(), &["u", "vx", "vz"]);
        assert_eq!(at.transitions().len(), 6);
        assert!(at.transition_failures().unwrap().is_empty());
    }

    #[test]
    fn mobius_sign_change() {
        let at = blowup_atlas(2, 2).unwrap();
        let w = at.mobius_check().unwrap();
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|w| w.changes_sign()));
        let r = at.charts()[0].chart().ring();
        assert_eq!(w[0].jacobian_det, RationalFunction::new(Poly::int(r, -1), Poly::parse(r, "v").unwrap()).unwrap());
    }

    #[test]
    fn lifts_in_first_chart() {
        let at = blowup_atlas(2, 2).unwrap();
        let m = at.ambient();
        let c0 = at.charts()[0].chart();
        let cases = [
            ("x*d/dx + y*d/dy", "u*d/du"),
            ("x*d/dy - y*d/dx", "-u*v*d/du + (1 + v^2)*d/dv"),
            ("x*d/dx", "u*d/du - v*d/dv"),
            ("x*d/dy", "d/dv"),
            ("y*d/dx", "u*v*d/du - v^2*d/dv"),
            ("y*d/dy", "v*d/dv"),
        ];
        for (y, expected) in cases {
            let y = field(m, y);
            let lift = lift_vector_field(&at, &y).unwrap();
            assert_eq!(lift[0], field(c0, expected), "{y}");
            let chart = &at.charts()[0];
            assert_eq!(jacobian(chart.blowdown()).mul_vec(lift[0].coeffs()).unwrap(), compose_field(chart.blowdown(), &y).unwrap());
        }
        match lift_vector_field(&at, &field(m, "d/dx")) {
            Err(Error::NotTangentToCenter { chart, component, .. }) => {
                assert_eq!(chart, "Ux");
                assert_eq!(component, "d/dv");
            }
            other => panic!("{other:?}"),
        }
        assert!(lift_bracket_check(&at, &field(m, "x*d/dy"), &field(m, "y*d/dx")).unwrap());
    }

    #[test]
    fn tangent_and_edge_modules() {
        let at = blowup_atlas(2, 2).unwrap();
        let c0 = at.charts()[0].chart();
        let bt = b_tangent_module(&at);
        assert!(submodule_equal(bt.module(0), &module(c0, &["u*d/du", "d/dv"])).unwrap().is_equal());
        assert_eq!(edge_module(&at), bt);

        let line = blowup_atlas(3, 2).unwrap();
        let l0 = line.charts()[0].chart();
        let bt = b_tangent_module(&line);
        let edge = edge_module(&line);
        assert!(submodule_equal(bt.module(0), &module(l0, &["d/dx", "u*d/du", "d/dv"])).unwrap().is_equal());
        assert!(submodule_equal(edge.module(0), &module(l0, &["u*d/dx", "u*d/du", "d/dv"])).unwrap().is_equal());
        assert!(edge.contained_in(&bt).unwrap().iter().all(|c| c.holds()));
        assert!(bt.contained_in(&edge).unwrap().iter().all(|c| c.refuted()));

        let hyper = blowup_atlas(2, 1).unwrap();
        let h0 = hyper.charts()[0].chart();
        assert!(submodule_equal(b_tangent_module(&hyper).module(0), &module(h0, &["d/dx", "u*d/du"])).unwrap().is_equal());
    }

    #[test]
    fn adapted_sections() {
        let at = blowup_atlas(2, 2).unwrap();
        let a = AlgebroidPresentation::tangent(at.ambient());
        let zero = resolve_subalgebroid(&a, &at, &SubalgebroidSpec::Zero).unwrap();
        let s = sections_adapted(&a, &zero, &at).unwrap();
        let expected = SubmodulePresentation::parse_rows(at.ambient().ring(), 2, &[vec!["x", "0"], vec!["0", "x"], vec!["y", "0"], vec!["0", "y"]]).unwrap();
        assert!(submodule_equal(&s, &expected).unwrap().is_equal());

        let full = SubmodulePresentation::free(at.center().ring(), 2);
        let s = sections_adapted(&a, &full, &at).unwrap();
        assert!(submodule_equal(&s, &SubmodulePresentation::free(at.ambient().ring(), 2)).unwrap().is_equal());

        let line = blowup_atlas(3, 2).unwrap();
        let a3 = AlgebroidPresentation::tangent(line.ambient());
        let dx = SubmodulePresentation::parse_rows(line.center().ring(), 3, &[vec!["1", "0", "0"]]).unwrap();
        let s = sections_adapted(&a3, &dx, &line).unwrap();
        let m = line.ambient();
        let expected = module(m, &["d/dx", "y*d/dy", "y*d/dz", "z*d/dy", "z*d/dz", "y*d/dx", "z*d/dx"]);
        assert!(submodule_equal(&s, &expected).unwrap().is_equal());
        let restricted = resolve_subalgebroid(&a3, &line, &SubalgebroidSpec::FullRestriction).unwrap();
        assert!(submodule_equal(&restricted, &dx).unwrap().is_equal());
    }

    #[test]
    fn kernel_containment_is_enforced() {
        let at = blowup_atlas(2, 2).unwrap();
        let m = at.ambient();
        let anchor = PolyMatrix::parse(m.ring(), &[vec!["x"], vec!["0"]]).unwrap();
        let a = AlgebroidPresentation::new(m, anchor, vec![vec![vec![Poly::zero(m.ring())]]]).unwrap();
        let zero = SubmodulePresentation::zero(at.center().ring(), 1);
        assert!(matches!(sections_adapted(&a, &zero, &at), Err(Error::Precondition(_))));
        let ker = resolve_subalgebroid(&a, &at, &SubalgebroidSpec::Kernel).unwrap();
        assert!(sections_adapted(&a, &ker, &at).is_ok());
    }

    #[test]
    fn base_lifts_for_point_center() {
        let at = blowup_atlas(2, 2).unwrap();
        let a = AlgebroidPresentation::tangent(at.ambient());
        let zero = resolve_subalgebroid(&a, &at, &SubalgebroidSpec::Zero).unwrap();
        let base = blup_foliation_base(&a, &zero, &at).unwrap();
        let c0 = at.charts()[0].chart();
        let lifts = module(c0, &["u*d/du - v*d/dv", "d/dv", "u*v*d/du - v^2*d/dv", "v*d/dv"]);
        assert!(submodule_equal(base.module(0), &lifts).unwrap().is_equal());
        assert!(base.equality(&b_tangent_module(&at)).unwrap().iter().all(|e| e.is_equal()));
    }

    #[test]
    fn intersections() {
        let at = blowup_atlas(2, 2).unwrap();
        let a = AlgebroidPresentation::tangent(at.ambient());
        let zero = resolve_subalgebroid(&a, &at, &SubalgebroidSpec::Zero).unwrap();
        let pulled = pullback_module(&a, &at).unwrap();
        assert!(pulled.module(0).len() >= 2);
        let e_c = e_c_module(&a, &zero, &at).unwrap();
        assert!(e_c.equality(&b_tangent_module(&at)).unwrap().iter().all(|e| e.is_equal()));
        let inter = blup_foliation_intersection(&a, &zero, &at).unwrap();
        assert!(inter.equality(&b_tangent_module(&at)).unwrap().iter().all(|e| e.is_equal()));

        let line = blowup_atlas(3, 2).unwrap();
        let a3 = AlgebroidPresentation::tangent(line.ambient());
        let zero = resolve_subalgebroid(&a3, &line, &SubalgebroidSpec::Zero).unwrap();
        let inter = blup_foliation_intersection(&a3, &zero, &line).unwrap();
        assert!(inter.equality(&edge_module(&line)).unwrap().iter().all(|e| e.is_equal()));
    }

    #[test]
    fn transversality_precondition() {
        let line = blowup_atlas(3, 2).unwrap();
        let m = line.ambient();
        let anchor = PolyMatrix::parse(m.ring(), &[vec!["1"], vec!["0"], vec!["0"]]).unwrap();
        let a = AlgebroidPresentation::new(m, anchor, vec![vec![vec![Poly::zero(m.ring())]]]).unwrap();
        let c = SubmodulePresentation::free(line.center().ring(), 1);
        match blup_foliation_intersection(&a, &c, &line) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("transversal")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identities_agree() {
        let at = blowup_atlas(2, 2).unwrap();
        let a = AlgebroidPresentation::tangent(at.ambient());
        let zero = resolve_subalgebroid(&a, &at, &SubalgebroidSpec::Zero).unwrap();
        let report = verify_blup_identities(&a, &zero, &at).unwrap();
        assert!(report.passes(), "{report:?}");
        assert!(report.restricted_formula.is_some() && report.isotropy_formula.is_some());
        assert!(report.overlap.points_checked >= 2 * OVERLAP_SAMPLES);

        let line = blowup_atlas(3, 2).unwrap();
        let a3 = AlgebroidPresentation::tangent(line.ambient());
        let ker = resolve_subalgebroid(&a3, &line, &SubalgebroidSpec::Kernel).unwrap();
        let report = verify_blup_identities(&a3, &ker, &line).unwrap();
        assert!(report.passes(), "{report:?}");
        assert!(report.isotropy_formula.is_some());
        assert!(report.intersection.equality(&edge_module(&line)).unwrap().iter().all(|e| e.is_equal()));

        let restricted = resolve_subalgebroid(&a3, &line, &SubalgebroidSpec::FullRestriction).unwrap();
        let report = verify_blup_identities(&a3, &restricted, &line).unwrap();
        assert!(report.passes(), "{report:?}");
        assert!(report.restricted_formula.is_some());
        assert!(report.intersection.equality(&b_tangent_module(&line)).unwrap().iter().all(|e| e.is_equal()));
    }

    #[test]
    fn rotation_foliation_blowup() {
        let at = blowup_atlas(2, 2).unwrap();
        let m = at.ambient();
        let anchor = PolyMatrix::parse(m.ring(), &[vec!["-y"], vec!["x"]]).unwrap();
        let a = AlgebroidPresentation::new(m, anchor, vec![vec![vec![Poly::zero(m.ring())]]]).unwrap();
        let ker = resolve_subalgebroid(&a, &at, &SubalgebroidSpec::Kernel).unwrap();
        let base = blup_foliation_base(&a, &ker, &at).unwrap();
        assert!(base.contained_in(&b_tangent_module(&at)).unwrap().iter().all(|c| c.holds()));
        assert!(base.overlap_check(&at, OVERLAP_SAMPLES).unwrap().passes());
        assert!(matches!(blup_foliation_intersection(&a, &ker, &at), Err(Error::Precondition(_))));
    }
}
