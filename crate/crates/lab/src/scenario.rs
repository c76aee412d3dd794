//! Scenario files: TOML tables of charts, maps and structures, followed by an
//! ordered list of checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use algebroid_core::algebra::{Poly, PolyMatrix, RingRef};
use algebroid_core::algebroid::AlgebroidPresentation;
use algebroid_core::blowup::{blowup_atlas, BlowupAtlas, SubalgebroidSpec};
use algebroid_core::charts::{Chart, PolyMap, VectorFieldPoly};
use algebroid_core::dirac::{DiracSpan, Section};
use algebroid_core::foliation::SingularFoliation;
use algebroid_core::submodule::SubmodulePresentation;
use algebroid_core::Error;
use serde::Deserialize;
use toml::Spanned;

use crate::checks::{kind_info, CheckKind};

/// A problem found while reading a scenario, with a 1-based position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Spanned<String>,
    description: Option<String>,
    #[serde(default)]
    charts: BTreeMap<String, RawChart>,
    #[serde(default)]
    maps: BTreeMap<String, RawMap>,
    #[serde(default)]
    foliations: BTreeMap<String, RawFoliation>,
    #[serde(default)]
    algebroids: BTreeMap<String, RawAlgebroid>,
    #[serde(default)]
    dirac: BTreeMap<String, RawDirac>,
    #[serde(default)]
    blowup: BTreeMap<String, RawBlowup>,
    #[serde(default)]
    checks: Vec<RawCheck>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    vars: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    source: Spanned<String>,
    target: Spanned<String>,
    rule: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFoliation {
    chart: Spanned<String>,
    fields: Vec<Spanned<String>>,
}

type RawMatrix = Vec<Vec<Spanned<String>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBracket {
    pair: [usize; 2],
    value: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebroid {
    chart: Spanned<String>,
    #[serde(default)]
    tangent: bool,
    anchor: Option<Spanned<RawMatrix>>,
    #[serde(default)]
    brackets: Vec<RawBracket>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    vector: Spanned<String>,
    form: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDirac {
    chart: Spanned<String>,
    poisson: Option<Spanned<RawMatrix>>,
    two_form: Option<Spanned<RawMatrix>>,
    sections: Option<Vec<RawSection>>,
}


#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlowup {
    ambient_dim: usize,
    center_codim: usize,
    algebroid: Option<Spanned<String>>,
    /// A kind name or a list of generator rows.
    subalgebroid: Option<Spanned<toml::Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    name: Spanned<String>,
    kind: Spanned<String>,
    expect: Spanned<String>,
    description: Option<String>,
    map: Option<Spanned<String>>,
    foliation: Option<Spanned<String>>,
    other: Option<Spanned<String>>,
    algebroid: Option<Spanned<String>>,
    dirac: Option<Spanned<String>>,
    supplied: Option<Spanned<String>>,
    blowup: Option<Spanned<String>>,
    field: Option<Spanned<String>>,
    element: Option<Vec<Spanned<String>>>,
    #[serde(default)]
    lifted: BTreeMap<String, Spanned<String>>,
    #[serde(default)]
    expect_lifts: BTreeMap<String, Spanned<String>>,
    expect_rank: Option<usize>,
    expect_witness_rank: Option<usize>,
    expect_pushed: Option<Vec<Spanned<String>>>,
    expect_module: Option<Spanned<String>>,
}

/// A blowup block: the atlas, the algebroid on the ambient space and the
/// subalgebroid over the center.
#[derive(Clone, Debug)]
pub struct BlowupSetup {
    pub atlas: BlowupAtlas,
    pub algebroid: AlgebroidPresentation,
    pub subalgebroid: SubalgebroidSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceModule {
    BTangent,
    Edge,
}

impl ReferenceModule {
    pub fn tag(&self) -> &'static str {
        match self {
            ReferenceModule::BTangent => "b_tangent",
            ReferenceModule::Edge => "edge",
        }
    }
}

/// Objects a check operates on, resolved from names.
#[derive(Clone, Debug)]
pub enum CheckSpec {
    Involutivity {
        foliation: SingularFoliation,
    },
    FoliationEqual {
        a: SingularFoliation,
        b: SingularFoliation,
    },
    Membership {
        foliation: SingularFoliation,
        element: Vec<Poly>,
    },
    AlgebroidAxioms {
        algebroid: AlgebroidPresentation,
    },
    PullbackFoliation {
        map: PolyMap,
        algebroid: AlgebroidPresentation,
    },
    TransverseRank {
        map: PolyMap,
        foliation: SingularFoliation,
        expect_rank: Option<usize>,
        expect_witness_rank: Option<usize>,
    },
    DiracCheck {
        dirac: DiracSpan,
    },
    BackwardImage {
        map: PolyMap,
        dirac: DiracSpan,
        supplied: Option<DiracSpan>,
        expect_pushed: Option<Vec<Poly>>,
    },
    PsiIsomorphism {
        map: PolyMap,
        dirac: DiracSpan,
    },
    DiracBlowdown {
        setup: BlowupSetup,
        dirac: DiracSpan,
        lifted: Vec<DiracSpan>,
    },
    Atlas {
        setup: BlowupSetup,
    },
    Lift {
        setup: BlowupSetup,
        field: VectorFieldPoly,
        expect_lifts: Vec<(usize, VectorFieldPoly)>,
    },
    BlupIdentities {
        setup: BlowupSetup,
        expect_module: Option<ReferenceModule>,
    },
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub description: Option<String>,
    pub expect: String,
    pub spec: CheckSpec,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    pub charts: BTreeMap<String, Chart>,
    pub maps: BTreeMap<String, PolyMap>,
    pub foliations: BTreeMap<String, SingularFoliation>,
    pub algebroids: BTreeMap<String, AlgebroidPresentation>,
    pub dirac: BTreeMap<String, DiracSpan>,
    pub blowups: BTreeMap<String, BlowupSetup>,
    pub checks: Vec<Check>,
}

struct Resolver<'t> {
    text: &'t str,
    diags: Vec<Diagnostic>,
    /// Declared names whose definition already produced a diagnostic.
    broken: BTreeSet<String>,
}

impl<'t> Resolver<'t> {
    fn at(&mut self, offset: usize, message: String) {
        let (line, column) = position(self.text, offset);
        self.diags.push(Diagnostic { line, column, message });
    }

    /// Report a core error for a string value, placing parse errors at the
    /// offending character.
    fn core_error<T>(&mut self, value: &Spanned<String>, e: Error) -> Option<T> {
        let start = value.span().start;
        match e {
            Error::Parse { offset, message } => {
                let quote = usize::from(self.text[start..].starts_with(['"', '\'']));
                self.at(start + quote + offset, format!("malformed expression `{}`: {message}", value.get_ref()))
            }
            other => self.at(start, other.to_string()),
        }
        None
    }

    fn mark_broken<R, T>(&mut self, declared: &BTreeMap<String, R>, resolved: &BTreeMap<String, T>) {
        let missing = declared.keys().filter(|k| !resolved.contains_key(*k)).cloned();
        self.broken.extend(missing);
    }

    fn lookup<T: Clone>(&mut self, table: &BTreeMap<String, T>, name: &Spanned<String>, what: &str) -> Option<T> {
        match table.get(name.get_ref()) {
            Some(v) => Some(v.clone()),
            None if self.broken.contains(name.get_ref()) => None,
            None => {
                self.at(name.span().start, format!("unresolved reference: no {what} named `{}`", name.get_ref()));
                None
            }
        }
    }

    fn poly(&mut self, ring: &RingRef, s: &Spanned<String>) -> Option<Poly> {
        match Poly::parse(ring, s.get_ref()) {
            Ok(p) => Some(p),
            Err(e) => self.core_error(s, e),
        }
    }

    fn matrix(&mut self, ring: &RingRef, m: &Spanned<RawMatrix>) -> Option<PolyMatrix> {
        let mut rows = Vec::new();
        let mut ok = true;
        for row in m.get_ref() {
            let mut r = Vec::new();
            for e in row {
                match self.poly(ring, e) {
                    Some(p) => r.push(p),
                    None => ok = false,
                }
            }
            rows.push(r);
        }
        if !ok {
            return None;
        }
        match PolyMatrix::from_rows(ring, rows) {
            Ok(m) => Some(m),
            Err(e) => {
                self.at(m.span().start, e.to_string());
                None
            }
        }
    }

    fn field(&mut self, chart: &Chart, s: &Spanned<String>) -> Option<VectorFieldPoly> {
        match VectorFieldPoly::parse(chart, s.get_ref()) {
            Ok(v) => Some(v),
            Err(e) => self.core_error(s, e),
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, Vec<Diagnostic>> {
    let raw: RawScenario = match toml::from_str(text) {
        Ok(r) => r,
        Err(e) => {
            let offset = e.span().map_or(0, |s| s.start);
            let (line, column) = position(text, offset);
            return Err(vec![Diagnostic {
                line,
                column,
                message: e.message().to_string(),
            }]);
        }
    };
    let mut r = Resolver {
        text,
        diags: Vec::new(),
        broken: BTreeSet::new(),
    };
    let scenario = resolve(&mut r, raw);
    if r.diags.is_empty() {
        Ok(scenario)
    } else {
        r.diags.sort_by_key(|d| (d.line, d.column));
        Err(r.diags)
    }
}

fn resolve(r: &mut Resolver, raw: RawScenario) -> Scenario {
    let mut charts = BTreeMap::new();
    for (name, c) in &raw.charts {
        let vars: Vec<&str> = c.vars.iter().map(|v| v.get_ref().as_str()).collect();
        match Chart::new(name, &vars) {
            Ok(ch) => {
                charts.insert(name.clone(), ch);
            }
            Err(e) => {
                let at = c.vars.first().map_or(0, |v| v.span().start);
                r.at(at, format!("chart `{name}`: {e}"));
            }
        }
    }

    r.mark_broken(&raw.charts, &charts);
    let mut maps = BTreeMap::new();
    let mut atlases = BTreeMap::new();
    for (name, b) in &raw.blowup {
        match blowup_atlas(b.ambient_dim, b.center_codim) {
            Ok(atlas) => {
                charts.insert(format!("{name}.M"), atlas.ambient().clone());
                charts.insert(format!("{name}.N"), atlas.center().clone());
                maps.insert(format!("{name}.inclusion"), atlas.inclusion());
                for c in atlas.charts() {
                    let key = format!("{name}.{}", c.chart().name());
                    charts.insert(key.clone(), c.chart().clone());
                    maps.insert(key, c.blowdown().clone());
                }
                atlases.insert(name.clone(), atlas);
            }
            Err(e) => r.at(0, format!("blowup `{name}`: {e}")),
        }
    }

    for (name, m) in &raw.maps {
        let (Some(src), Some(dst)) = (r.lookup(&charts, &m.source, "chart"), r.lookup(&charts, &m.target, "chart")) else {
            continue;
        };
        match PolyMap::parse(&src, &dst, m.rule.get_ref()) {
            Ok(f) => {
                maps.insert(name.clone(), f);
            }
            Err(e) => {
                r.core_error::<()>(&m.rule, e);
            }
        }
    }

    r.mark_broken(&raw.maps, &maps);
    let mut foliations = BTreeMap::new();
    for (name, f) in &raw.foliations {
        let Some(chart) = r.lookup(&charts, &f.chart, "chart") else { continue };
        let fields: Option<Vec<_>> = f.fields.iter().map(|s| r.field(&chart, s)).collect();
        if let Some(fields) = fields {
            match SingularFoliation::from_fields(&chart, &fields) {
                Ok(fol) => {
                    foliations.insert(name.clone(), fol);
                }
                Err(e) => r.at(f.chart.span().start, e.to_string()),
            }
        }
    }

    r.mark_broken(&raw.foliations, &foliations);
    let mut algebroids = BTreeMap::new();
    for (name, a) in &raw.algebroids {
        let Some(chart) = r.lookup(&charts, &a.chart, "chart") else { continue };
        if let Some(alg) = resolve_algebroid(r, &chart, a) {
            algebroids.insert(name.clone(), alg);
        }
    }

    r.mark_broken(&raw.algebroids, &algebroids);
    let mut dirac = BTreeMap::new();
    for (name, d) in &raw.dirac {
        let Some(chart) = r.lookup(&charts, &d.chart, "chart") else { continue };
        if let Some(l) = resolve_dirac(r, &chart, d) {
            dirac.insert(name.clone(), l);
        }
    }

    r.mark_broken(&raw.dirac, &dirac);
    let mut blowups = BTreeMap::new();
    for (name, b) in &raw.blowup {
        let Some(atlas) = atlases.get(name).cloned() else { continue };
        let algebroid = match &b.algebroid {
            None => AlgebroidPresentation::tangent(atlas.ambient()),
            Some(s) if s.get_ref() == "tangent" => AlgebroidPresentation::tangent(atlas.ambient()),
            Some(s) => match r.lookup(&algebroids, s, "algebroid") {
                Some(a) => {
                    if let Err(e) = atlas.ambient().check_same(a.chart()) {
                        r.at(s.span().start, format!("algebroid `{}` does not live on the blowup ambient space: {e}", s.get_ref()));
                        continue;
                    }
                    a
                }
                None => continue,
            },
        };
        let subalgebroid = match &b.subalgebroid {
            None => SubalgebroidSpec::Zero,
            Some(v) => match resolve_subalgebroid_spec(r, &atlas, algebroid.rank(), v) {
                Some(spec) => spec,
                None => continue,
            },
        };
        blowups.insert(
            name.clone(),
            BlowupSetup {
                atlas,
                algebroid,
                subalgebroid,
            },
        );
    }

    r.mark_broken(&raw.blowup, &blowups);
    let mut scenario = Scenario {
        name: raw.name.get_ref().clone(),
        description: raw.description.clone(),
        charts,
        maps,
        foliations,
        algebroids,
        dirac,
        blowups,
        checks: Vec::new(),
    };
    let mut seen = BTreeSet::new();
    for c in &raw.checks {
        if !seen.insert(c.name.get_ref().clone()) {
            r.at(c.name.span().start, format!("duplicate check name `{}`", c.name.get_ref()));
            continue;
        }
        if let Some(check) = resolve_check(r, &scenario, c) {
            scenario.checks.push(check);
        }
    }
    scenario
}

fn resolve_subalgebroid_spec(
    r: &mut Resolver,
    atlas: &BlowupAtlas,
    rank: usize,
    v: &Spanned<toml::Value>,
) -> Option<SubalgebroidSpec> {
    let at = v.span().start;
    let expected = "expected zero, kernel, full_restriction or a list of generator rows";
    match v.get_ref() {
        toml::Value::String(k) => match k.as_str() {
            "zero" => Some(SubalgebroidSpec::Zero),
            "kernel" => Some(SubalgebroidSpec::Kernel),
            "full_restriction" => Some(SubalgebroidSpec::FullRestriction),
            other => {
                r.at(at, format!("unknown subalgebroid `{other}`; {expected}"));
                None
            }
        },
        toml::Value::Array(rows) => {
            let ring = atlas.center().ring().clone();
            let mut gens = Vec::new();
            for row in rows {
                let entries = row.as_array().map(|es| es.iter().map(|e| e.as_str()).collect::<Option<Vec<_>>>());
                let Some(Some(entries)) = entries else {
                    r.at(at, format!("subalgebroid rows must be arrays of strings; {expected}"));
                    return None;
                };
                let mut g = Vec::new();
                for e in entries {
                    match Poly::parse(&ring, e) {
                        Ok(p) => g.push(p),
                        Err(err) => {
                            r.at(at, format!("malformed expression `{e}` in subalgebroid: {err}"));
                            return None;
                        }
                    }
                }
                gens.push(g);
            }
            match SubmodulePresentation::new(&ring, rank, gens) {
                Ok(m) => Some(SubalgebroidSpec::Explicit(m)),
                Err(e) => {
                    r.at(at, format!("subalgebroid generators: {e}"));
                    None
                }
            }
        }
        _ => {
            r.at(at, format!("invalid subalgebroid; {expected}"));
            None
        }
    }
}

fn resolve_algebroid(r: &mut Resolver, chart: &Chart, a: &RawAlgebroid) -> Option<AlgebroidPresentation> {
    if a.tangent {
        if a.anchor.is_some() || !a.brackets.is_empty() {
            r.at(a.chart.span().start, "a tangent algebroid takes no anchor or brackets".into());
            return None;
        }
        return Some(AlgebroidPresentation::tangent(chart));
    }
    let Some(anchor) = &a.anchor else {
        r.at(a.chart.span().start, "algebroid needs `anchor` or `tangent = true`".into());
        return None;
    };
    let m = r.matrix(chart.ring(), anchor)?;
    let mut brackets = BTreeMap::new();
    for b in &a.brackets {
        let v: Option<Vec<Poly>> = b.value.iter().map(|e| r.poly(chart.ring(), e)).collect();
        brackets.insert((b.pair[0], b.pair[1]), v?);
    }
    match AlgebroidPresentation::from_brackets(chart, m, &brackets) {
        Ok(alg) => Some(alg),
        Err(e) => {
            r.at(anchor.span().start, format!("algebroid: {e}"));
            None
        }
    }
}

fn resolve_dirac(r: &mut Resolver, chart: &Chart, d: &RawDirac) -> Option<DiracSpan> {
    let given = [d.poisson.is_some(), d.two_form.is_some(), d.sections.is_some()].iter().filter(|&&b| b).count();
    if given != 1 {
        r.at(d.chart.span().start, "a Dirac structure needs exactly one of `poisson`, `two_form`, `sections`".into());
        return None;
    }
    let result = if let Some(p) = &d.poisson {
        let m = r.matrix(chart.ring(), p)?;
        DiracSpan::poisson_graph(chart, &m)
    } else if let Some(w) = &d.two_form {
        let m = r.matrix(chart.ring(), w)?;
        DiracSpan::two_form_graph(chart, &m)
    } else {
        let mut gens = Vec::new();
        for s in d.sections.as_ref().expect("counted above") {
            let v = r.field(chart, &s.vector);
            let f = match algebroid_core::charts::OneFormPoly::parse(chart, s.form.get_ref()) {
                Ok(f) => Some(f),
                Err(e) => r.core_error(&s.form, e),
            };
            gens.push(Section::new(v?, f?).ok()?);
        }
        DiracSpan::new(chart, gens)
    };
    match result {
        Ok(l) => Some(l),
        Err(e) => {
            r.at(d.chart.span().start, format!("Dirac structure: {e}"));
            None
        }
    }
}

fn require<'a>(r: &mut Resolver, c: &RawCheck, field: &'a Option<Spanned<String>>, key: &str) -> Option<&'a Spanned<String>> {
    if field.is_none() {
        r.at(
            c.kind.span().start,
            format!("check `{}` of kind `{}` needs `{key}`", c.name.get_ref(), c.kind.get_ref()),
        );
    }
    field.as_ref()
}

fn resolve_check(r: &mut Resolver, s: &Scenario, c: &RawCheck) -> Option<Check> {
    let Some(info) = kind_info(c.kind.get_ref()) else {
        r.at(c.kind.span().start, format!("unknown check kind `{}`", c.kind.get_ref()));
        return None;
    };
    if !info.outcomes.contains(&c.expect.get_ref().as_str()) {
        r.at(
            c.expect.span().start,
            format!(
                "unknown expected outcome `{}` for kind `{}`; expected one of {}",
                c.expect.get_ref(),
                info.name,
                info.outcomes.join(", ")
            ),
        );
        return None;
    }
    let spec = match info.kind {
        CheckKind::Involutivity => CheckSpec::Involutivity {
            foliation: foliation_ref(r, s, c)?,
        },
        CheckKind::FoliationEqual => {
            let a = foliation_ref(r, s, c);
            let b = require(r, c, &c.other, "other").and_then(|n| r.lookup(&s.foliations, n, "foliation"));
            CheckSpec::FoliationEqual { a: a?, b: b? }
        }
        CheckKind::Membership => {
            let foliation = foliation_ref(r, s, c)?;
            let Some(element) = &c.element else {
                r.at(c.kind.span().start, format!("check `{}` needs `element`", c.name.get_ref()));
                return None;
            };
            let ring = foliation.chart().ring().clone();
            let element: Option<Vec<Poly>> = element.iter().map(|e| r.poly(&ring, e)).collect();
            CheckSpec::Membership {
                foliation,
                element: element?,
            }
        }
        CheckKind::AlgebroidAxioms => CheckSpec::AlgebroidAxioms {
            algebroid: algebroid_ref(r, s, c)?,
        },
        CheckKind::PullbackFoliation => {
            let map = map_ref(r, s, c);
            let algebroid = algebroid_ref(r, s, c);
            CheckSpec::PullbackFoliation {
                map: map?,
                algebroid: algebroid?,
            }
        }
        CheckKind::TransverseRank => {
            let map = map_ref(r, s, c);
            let foliation = if let Some(d) = &c.dirac {
                r.lookup(&s.dirac, d, "Dirac structure").map(|l| l.foliation())
            } else if let Some(a) = &c.algebroid {
                r.lookup(&s.algebroids, a, "algebroid").map(|a| algebroid_core::algebroid::induced_foliation(&a))
            } else {
                foliation_ref(r, s, c)
            };
            CheckSpec::TransverseRank {
                map: map?,
                foliation: foliation?,
                expect_rank: c.expect_rank,
                expect_witness_rank: c.expect_witness_rank,
            }
        }
        CheckKind::DiracCheck => CheckSpec::DiracCheck {
            dirac: dirac_ref(r, s, c)?,
        },
        CheckKind::BackwardImage => {
            let map = map_ref(r, s, c);
            let dirac = dirac_ref(r, s, c);
            let supplied = match &c.supplied {
                Some(n) => Some(r.lookup(&s.dirac, n, "Dirac structure")?),
                None => None,
            };
            let map = map?;
            let expect_pushed = match &c.expect_pushed {
                Some(v) => {
                    let ring = map.source().ring().clone();
                    let v: Option<Vec<Poly>> = v.iter().map(|e| r.poly(&ring, e)).collect();
                    Some(v?)
                }
                None => None,
            };
            CheckSpec::BackwardImage {
                map,
                dirac: dirac?,
                supplied,
                expect_pushed,
            }
        }
        CheckKind::PsiIsomorphism => {
            let map = map_ref(r, s, c);
            let dirac = dirac_ref(r, s, c);
            CheckSpec::PsiIsomorphism { map: map?, dirac: dirac? }
        }
        CheckKind::DiracBlowdown => {
            let setup = blowup_ref(r, s, c)?;
            let dirac = dirac_ref(r, s, c)?;
            let mut lifted = Vec::new();
            for chart in setup.atlas.charts() {
                let Some(n) = c.lifted.get(chart.chart().name()) else {
                    r.at(
                        c.name.span().start,
                        format!("check `{}` needs a lifted span for chart `{}`", c.name.get_ref(), chart.chart().name()),
                    );
                    return None;
                };
                let l = r.lookup(&s.dirac, n, "Dirac structure")?;
                if chart.chart().check_same(l.chart()).is_err() {
                    r.at(n.span().start, format!("lifted span `{}` is not on chart `{}`", n.get_ref(), chart.chart().name()));
                    return None;
                }
                lifted.push(l);
            }
            CheckSpec::DiracBlowdown { setup, dirac, lifted }
        }
        CheckKind::Atlas => CheckSpec::Atlas {
            setup: blowup_ref(r, s, c)?,
        },
        CheckKind::Lift => {
            let setup = blowup_ref(r, s, c)?;
            let f = require(r, c, &c.field, "field")?;
            let field = r.field(setup.atlas.ambient(), f)?;
            let mut expect_lifts = Vec::new();
            for (chart_name, v) in &c.expect_lifts {
                let Some(i) = setup.atlas.charts().iter().position(|ch| ch.chart().name() == chart_name) else {
                    r.at(v.span().start, format!("unresolved reference: no blowup chart named `{chart_name}`"));
                    return None;
                };
                let lift = r.field(setup.atlas.charts()[i].chart(), v)?;
                expect_lifts.push((i, lift));
            }
            CheckSpec::Lift {
                setup,
                field,
                expect_lifts,
            }
        }
        CheckKind::BlupIdentities => {
            let setup = blowup_ref(r, s, c)?;
            let expect_module = match &c.expect_module {
                None => None,
                Some(m) => match m.get_ref().as_str() {
                    "b_tangent" => Some(ReferenceModule::BTangent),
                    "edge" => Some(ReferenceModule::Edge),
                    other => {
                        r.at(m.span().start, format!("unknown reference module `{other}`; expected b_tangent or edge"));
                        return None;
                    }
                },
            };
            CheckSpec::BlupIdentities { setup, expect_module }
        }
    };
    Some(Check {
        name: c.name.get_ref().clone(),
        kind: info.kind,
        description: c.description.clone(),
        expect: c.expect.get_ref().clone(),
        spec,
    })
}

fn foliation_ref(r: &mut Resolver, s: &Scenario, c: &RawCheck) -> Option<SingularFoliation> {
    let n = require(r, c, &c.foliation, "foliation")?;
    r.lookup(&s.foliations, n, "foliation")
}

fn algebroid_ref(r: &mut Resolver, s: &Scenario, c: &RawCheck) -> Option<AlgebroidPresentation> {
    let n = require(r, c, &c.algebroid, "algebroid")?;
    r.lookup(&s.algebroids, n, "algebroid")
}

fn map_ref(r: &mut Resolver, s: &Scenario, c: &RawCheck) -> Option<PolyMap> {
    let n = require(r, c, &c.map, "map")?;
    r.lookup(&s.maps, n, "map")
}

fn dirac_ref(r: &mut Resolver, s: &Scenario, c: &RawCheck) -> Option<DiracSpan> {
    let n = require(r, c, &c.dirac, "dirac")?;
    r.lookup(&s.dirac, n, "Dirac structure")
}

fn blowup_ref(r: &mut Resolver, s: &Scenario, c: &RawCheck) -> Option<BlowupSetup> {
    let n = require(r, c, &c.blowup, "blowup")?;
    r.lookup(&s.blowups, n, "blowup")
}
