//! Executing the checks of a scenario.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use algebroid_core::algebroid::{axioms_check, verify_pullback_foliation_identity, AxiomFailure, AxiomsVerdict};
use algebroid_core::blowup::{
    b_tangent_module, edge_module, lift_vector_field, resolve_subalgebroid, verify_blup_identities, ChartwiseModule,
};
use algebroid_core::charts::{default_samples, RankVerdict};
use algebroid_core::dirac::{dirac_check, verify_dirac_identities, verify_psi_isomorphism, DiracCheck};
use algebroid_core::foliation::{involutivity_check, transversality_report, InvolutivityVerdict};
use algebroid_core::submodule::{module_membership, submodule_equal, ModuleEquality};
use algebroid_core::{Error, Result};
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::checks::info;
use crate::scenario::{Check, CheckSpec, ReferenceModule, Scenario};
use crate::witness as w;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub kind: &'static str,
    pub expected: String,
    pub outcome: String,
    pub passed: bool,
    pub detail: String,
    /// Expectations beyond the outcome that did not hold.
    pub mismatches: Vec<String>,
    pub witness: Value,
    pub micros: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Outcome {
    outcome: String,
    detail: String,
    witness: Value,
    mismatches: Vec<String>,
}

impl Outcome {
    fn new(outcome: &str, detail: String, witness: Value) -> Self {
        Outcome {
            outcome: outcome.to_string(),
            detail,
            witness,
            mismatches: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.mismatches.push(message());
        }
    }
}

pub fn run_scenario(s: &Scenario, options: &RunOptions) -> Report {
    let go = || s.checks.par_iter().map(run_check).collect::<Vec<_>>();
    let checks = match options.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(go),
            Err(_) => s.checks.iter().map(run_check).collect(),
        },
        None => go(),
    };
    Report {
        scenario: s.name.clone(),
        checks,
    }
}

pub fn run_check(c: &Check) -> CheckReport {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(|| evaluate(&c.spec)));
    let micros = start.elapsed().as_micros() as u64;
    let o = match result {
        Ok(Ok(o)) => o,
        Ok(Err(e)) => Outcome::new("error", e.to_string(), json!({"error": e.to_string()})),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal error".into());
            Outcome::new("error", format!("internal error: {msg}"), json!({"error": msg}))
        }
    };
    let passed = o.outcome == c.expect && o.mismatches.is_empty();
    CheckReport {
        name: c.name.clone(),
        kind: info(c.kind).name,
        expected: c.expect.clone(),
        outcome: o.outcome,
        passed,
        detail: o.detail,
        mismatches: o.mismatches,
        witness: o.witness,
        micros,
    }
}

fn equality_outcome(e: &ModuleEquality) -> &'static str {
    if e.is_equal() {
        "equal"
    } else if e.strictly_smaller() {
        "strict"
    } else {
        "not_equal"
    }
}

fn dirac_json(c: &DiracCheck) -> Value {
    json!({
        "isotropy_failure": c.isotropy_failure.as_ref().map(|(i, j, p)| json!({"pair": [i, j], "pairing": p.to_string()})),
        "generic_rank": c.generic_rank,
        "rank": w::rank(&c.rank),
        "involutivity": w::involutivity(&c.involutivity),
    })
}

fn chartwise_json(m: &ChartwiseModule) -> Value {
    Value::Object(
        m.charts()
            .iter()
            .zip(m.modules())
            .map(|(c, g)| (c.name().to_string(), w::module(g)))
            .collect(),
    )
}

fn per_chart_equalities(names: &[String], eqs: &[ModuleEquality]) -> Value {
    Value::Object(names.iter().cloned().zip(eqs.iter().map(w::equality)).collect())
}

fn evaluate(spec: &CheckSpec) -> Result<Outcome> {
    Ok(match spec {
        CheckSpec::Involutivity { foliation } => {
            let v = involutivity_check(foliation);
            let detail = match &v {
                InvolutivityVerdict::Verified => format!("{} generators, all brackets in the module", foliation.module().len()),
                InvolutivityVerdict::NotVerified { pair, bracket, .. } => {
                    format!("bracket of generators {} and {} is {bracket}, not in the module", pair.0 + 1, pair.1 + 1)
                }
                InvolutivityVerdict::Inconclusive { pair, bracket } => {
                    format!("bracket of generators {} and {} is {bracket}, membership undecided", pair.0 + 1, pair.1 + 1)
                }
            };
            Outcome::new(
                v.tag(),
                detail,
                json!({"generators": w::module(foliation.module()), "involutivity": w::involutivity(&v)}),
            )
        }
        CheckSpec::FoliationEqual { a, b } => {
            let e = submodule_equal(a.module(), b.module())?;
            let out = equality_outcome(&e);
            Outcome::new(out, format!("modules compare as {out}"), w::equality(&e))
        }
        CheckSpec::Membership { foliation, element } => {
            let m = module_membership(element, foliation.module())?;
            Outcome::new(m.tag(), format!("element {}", algebroid_core::submodule::fmt_vector(element)), w::membership(&m))
        }
        CheckSpec::AlgebroidAxioms { algebroid } => {
            let v = axioms_check(algebroid);
            let failures: Vec<Value> = match &v {
                AxiomsVerdict::Verified => Vec::new(),
                AxiomsVerdict::Failed(fs) => fs
                    .iter()
                    .map(|f| match f {
                        AxiomFailure::Anchor { pair, defect } => {
                            json!({"axiom": "anchor", "pair": [pair.0, pair.1], "defect": w::vector(defect)})
                        }
                        AxiomFailure::Jacobi {
                            triple,
                            coordinate,
                            jacobiator,
                        } => json!({
                            "axiom": "jacobi",
                            "triple": [triple.0, triple.1, triple.2],
                            "coordinate": coordinate,
                            "jacobiator": w::vector(jacobiator),
                        }),
                    })
                    .collect(),
            };
            let detail = if failures.is_empty() {
                format!("rank {} algebroid, anchor and Jacobi identities hold", algebroid.rank())
            } else {
                format!("{} axiom failures", failures.len())
            };
            Outcome::new(v.tag(), detail, json!({"failures": failures}))
        }
        CheckSpec::PullbackFoliation { map, algebroid } => {
            let r = verify_pullback_foliation_identity(map, algebroid, &default_samples(map.source().dim()))?;
            let out = if !r.hypothesis_holds() {
                "not_smooth"
            } else if r.equal() {
                "equal"
            } else {
                "not_equal"
            };
            Outcome::new(
                out,
                format!("pullback rank: {}; foliations {}", r.hypothesis, equality_outcome(&r.equality)),
                json!({
                    "hypothesis": w::rank(&r.hypothesis),
                    "pullback_algebroid_foliation": w::module(r.anchored.module()),
                    "preimage_foliation": w::module(r.pulled_back.module()),
                    "equality": w::equality(&r.equality),
                }),
            )
        }
        CheckSpec::TransverseRank {
            map,
            foliation,
            expect_rank,
            expect_witness_rank,
        } => {
            let v = transversality_report(map, foliation, &default_samples(map.source().dim()))?;
            let mut o = Outcome::new(v.tag(), v.to_string(), w::rank(&v));
            if let Some(r) = expect_rank {
                o.expect(v.rank() == *r, || format!("expected rank {r}, got {}", v.rank()));
            }
            if let Some(r) = expect_witness_rank {
                let got = match &v {
                    RankVerdict::NotConstantRank { witness_rank, .. } => Some(*witness_rank),
                    _ => None,
                };
                o.expect(got == Some(*r), || format!("expected a witness of rank {r}, got {got:?}"));
            }
            o
        }
        CheckSpec::DiracCheck { dirac } => {
            let c = dirac_check(dirac);
            let n = dirac.chart().dim();
            let out = if c.passes(n) { "pass" } else { "fail" };
            Outcome::new(
                out,
                format!(
                    "isotropic: {}, rank: {}, involutivity: {}",
                    c.isotropic(),
                    c.rank,
                    c.involutivity.tag()
                ),
                dirac_json(&c),
            )
        }
        CheckSpec::BackwardImage {
            map,
            dirac,
            supplied,
            expect_pushed,
        } => {
            let r = verify_dirac_identities(map, dirac, supplied.as_ref())?;
            let out = match &r.preimage_vs_backward {
                None => "no_span",
                Some(e) => equality_outcome(e),
            };
            let obstruction = r.obstruction.as_ref().map(|o| {
                json!({
                    "component": o.component,
                    "element": o.element.to_string(),
                    "ideal": w::vector(&o.ideal),
                    "reduced_element": o.reduced_element.to_string(),
                    "reduced_ideal": w::vector(&o.reduced_ideal),
                    "membership": w::membership(&o.result),
                })
            });
            let mut detail = format!("pullback rank: {}; preimage vs backward image: {out}", r.pullback_verdict);
            if let (Some(p), Some(o)) = (&r.pushed_witness, &r.obstruction) {
                detail.push_str(&format!(
                    "; f_* X = {}; component {}: {} in <{}> is {}",
                    algebroid_core::submodule::fmt_vector(p),
                    o.component + 1,
                    o.reduced_element,
                    o.reduced_ideal.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "),
                    o.result.tag()
                ));
            }
            let mut o = Outcome::new(
                out,
                detail,
                json!({
                    "pullback_rank": w::rank(&r.pullback_verdict),
                    "backward_image": r.span.as_ref().map(|s| Value::Array(s.generators().iter().map(|g| Value::String(g.to_string())).collect())),
                    "span_check": r.span_check.as_ref().map(dirac_json),
                    "preimage_foliation": w::module(r.f_preimage.module()),
                    "backward_foliation": r.f_backward.as_ref().map(|f| w::module(f.module())),
                    "pullback_algebroid_foliation": w::module(r.f_pullback_algebroid.module()),
                    "preimage_vs_backward": r.preimage_vs_backward.as_ref().map(w::equality),
                    "backward_vs_pullback_algebroid": r.backward_vs_algebroid.as_ref().map(w::equality),
                    "pushed_witness": r.pushed_witness.as_ref().map(|v| w::vector(v)),
                    "obstruction": obstruction,
                }),
            );
            if let Some(p) = expect_pushed {
                o.expect(r.pushed_witness.as_ref() == Some(p), || {
                    format!(
                        "expected f_* X = {}, got {:?}",
                        algebroid_core::submodule::fmt_vector(p),
                        r.pushed_witness.as_ref().map(|v| algebroid_core::submodule::fmt_vector(v))
                    )
                });
            }
            o
        }
        CheckSpec::PsiIsomorphism { map, dirac } => {
            let r = verify_psi_isomorphism(map, dirac)?;
            let out = if !r.hypothesis_holds(map.target().dim()) {
                "not_transverse"
            } else if r.passes(map.source().dim()) {
                "pass"
            } else {
                "fail"
            };
            Outcome::new(
                out,
                format!(
                    "anchor preserved: {}, image rank: {}, brackets preserved: {}, injective on {} samples: {}",
                    r.anchor_preserved,
                    r.image_rank,
                    r.bracket_failure.is_none(),
                    r.injectivity_samples,
                    r.injectivity_failure.is_none()
                ),
                json!({
                    "transversality": w::rank(&r.hypothesis),
                    "anchor_preserved": r.anchor_preserved,
                    "image_rank": w::rank(&r.image_rank),
                    "bracket_failure": r.bracket_failure.map(|(i, j)| json!([i, j])),
                    "injectivity_failure": r.injectivity_failure.as_ref().map(|p| w::point(p)),
                    "injectivity_samples": r.injectivity_samples,
                }),
            )
        }
        CheckSpec::DiracBlowdown { setup, dirac, lifted } => {
            let atlas = &setup.atlas;
            let k = atlas.divisor_var();
            let n = atlas.ambient_dim();
            let mut charts = serde_json::Map::new();
            let mut all = true;
            let mut notes = Vec::new();
            for (chart, span) in atlas.charts().iter().zip(lifted) {
                let p = chart.blowdown();
                let rank = transversality_report(p, &dirac.foliation(), &default_samples(n))?;
                let jumps = match &rank {
                    RankVerdict::NotConstantRank {
                        generic_rank,
                        witness,
                        witness_rank,
                    } => *generic_rank == n && witness_rank < generic_rank && witness[k].is_zero(),
                    _ => false,
                };
                let check = dirac_check(span);
                let report = verify_dirac_identities(p, dirac, Some(span))?;
                let ok = jumps && check.passes(n) && report.foliations_agree();
                if !ok {
                    notes.push(chart.chart().name().to_string());
                }
                all &= ok;
                charts.insert(
                    chart.chart().name().to_string(),
                    json!({
                        "pullback_rank": w::rank(&rank),
                        "rank_jumps_on_divisor": jumps,
                        "lifted_span": dirac_json(&check),
                        "preimage_vs_backward": report.preimage_vs_backward.as_ref().map(w::equality),
                    }),
                );
            }
            let detail = if all {
                format!("{} charts: rank drops on the divisor, lifted span is Dirac, foliations agree", atlas.charts().len())
            } else {
                format!("failed in charts {}", notes.join(", "))
            };
            Outcome::new(if all { "pass" } else { "fail" }, detail, Value::Object(charts))
        }
        CheckSpec::Atlas { setup } => {
            let atlas = &setup.atlas;
            let failures = atlas.transition_failures()?;
            let mobius = atlas.mobius_check()?;
            let sound = failures.is_empty() && mobius.iter().all(|m| m.changes_sign());
            let names = atlas.chart_names();
            let transitions: Vec<Value> = atlas
                .transitions()
                .iter()
                .map(|t| {
                    json!({
                        "from": names[t.from],
                        "to": names[t.to],
                        "components": t.components.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let signs: Vec<Value> = mobius
                .iter()
                .map(|m| {
                    json!({
                        "from": names[m.from],
                        "to": names[m.to],
                        "normal_factor": m.factor.to_string(),
                        "jacobian_det": m.jacobian_det.to_string(),
                        "positive_at": m.positive.as_ref().map(|p| w::point(p)),
                        "negative_at": m.negative.as_ref().map(|p| w::point(p)),
                    })
                })
                .collect();
            Outcome::new(
                if sound { "sound" } else { "unsound" },
                format!(
                    "{} charts, {} transitions, identity failures: {}, sign changes: {}/{}",
                    names.len(),
                    transitions.len(),
                    failures.len(),
                    mobius.iter().filter(|m| m.changes_sign()).count(),
                    mobius.len()
                ),
                json!({
                    "charts": atlas.charts().iter().map(|c| json!({"name": c.chart().name(), "blowdown": c.blowdown().to_string()})).collect::<Vec<_>>(),
                    "transitions": transitions,
                    "identity_failures": failures.iter().map(|(a, b)| json!([names[*a], names[*b]])).collect::<Vec<_>>(),
                    "normal_factor_signs": signs,
                }),
            )
        }
        CheckSpec::Lift {
            setup,
            field,
            expect_lifts,
        } => match lift_vector_field(&setup.atlas, field) {
            Ok(lifts) => {
                let names = setup.atlas.chart_names();
                let mut o = Outcome::new(
                    "lifted",
                    names.iter().zip(&lifts).map(|(n, l)| format!("{n}: {l}")).collect::<Vec<_>>().join("; "),
                    Value::Object(names.iter().cloned().zip(lifts.iter().map(|l| Value::String(l.to_string()))).collect()),
                );
                for (i, expected) in expect_lifts {
                    o.expect(lifts[*i] == *expected, || format!("{}: expected {expected}, got {}", names[*i], lifts[*i]));
                }
                o
            }
            Err(Error::NotTangentToCenter {
                chart,
                component,
                remainder,
            }) => Outcome::new(
                "not_tangent",
                format!("{chart}: coefficient of {component} is {remainder}"),
                json!({"chart": chart, "component": component, "quotient": remainder}),
            ),
            Err(e) => return Err(e),
        },
        CheckSpec::BlupIdentities { setup, expect_module } => {
            let atlas = &setup.atlas;
            let c = resolve_subalgebroid(&setup.algebroid, atlas, &setup.subalgebroid)?;
            let report = match verify_blup_identities(&setup.algebroid, &c, atlas) {
                Ok(r) => r,
                Err(Error::Precondition(msg)) => {
                    return Ok(Outcome::new("refused", msg.clone(), json!({"precondition": msg})));
                }
                Err(e) => return Err(e),
            };
            let names = atlas.chart_names();
            let out = if report.equal() { "equal" } else { "not_equal" };
            let mut o = Outcome::new(
                out,
                String::new(),
                json!({
                    "subalgebroid": setup.subalgebroid.tag(),
                    "subalgebroid_generators": w::module(&c),
                    "from_lifts": chartwise_json(&report.base),
                    "intersection": chartwise_json(&report.intersection),
                    "equality": per_chart_equalities(&names, &report.equality),
                    "restricted_formula": report.restricted_formula.as_ref().map(|e| per_chart_equalities(&names, e)),
                    "isotropy_rank": report.isotropy_rank.as_ref().map(w::rank),
                    "isotropy_formula": report.isotropy_formula.as_ref().map(|e| per_chart_equalities(&names, e)),
                    "divisor_tangency": report.divisor_tangency.iter().map(|c| c.holds()).collect::<Vec<_>>(),
                    "overlap_points": report.overlap.points_checked,
                    "overlap_failures": report.overlap.failures.len(),
                    "involutivity": report.involutivity.iter().map(w::involutivity).collect::<Vec<_>>(),
                }),
            );
            o.expect(report.passes(), || "formula, tangency, overlap or involutivity sub-check failed".into());
            let mut detail = format!("lifts vs intersection: {out}");
            if report.restricted_formula.is_some() {
                detail.push_str("; b-tangent formula checked");
            }
            if report.isotropy_formula.is_some() {
                detail.push_str("; edge formula checked");
            }
            detail.push_str(&format!("; overlap points: {}", report.overlap.points_checked));
            if let Some(m) = expect_module {
                let reference = match m {
                    ReferenceModule::BTangent => b_tangent_module(atlas),
                    ReferenceModule::Edge => edge_module(atlas),
                };
                let eqs = report.intersection.equality(&reference)?;
                let ok = eqs.iter().all(|e| e.is_equal());
                detail.push_str(&format!("; equals {} module: {ok}", m.tag()));
                o.expect(ok, || format!("result is not the {} module", m.tag()));
            }
            o.detail = detail;
            o
        }
    })
}
