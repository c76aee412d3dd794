//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use algebroid_core::algebra::{rat, Poly, Ring, RingRef};
use algebroid_core::algebroid::{verify_pullback_foliation_identity, AlgebroidPresentation};
use algebroid_core::blowup::{
    b_tangent_module, blowup_atlas, blup_foliation_intersection, lift_vector_field, resolve_subalgebroid, verify_blup_identities,
    BlowupAtlas, ChartwiseModule, SubalgebroidSpec,
};
use algebroid_core::charts::{default_samples, Chart, OneFormPoly, PolyMap, VectorFieldPoly};
use algebroid_core::dirac::{backward_image, courant_bracket, dirac_check, isotropy_failure, pairing, verify_dirac_identities, DiracSpan, Section};
use algebroid_core::foliation::SingularFoliation;
use algebroid_core::submodule::{combine, contains, module_membership, submodule_equal, Containment, MembershipResult, SubmodulePresentation};
use algebroid_core::Error;
use algebroid_lab::bundled::{lookup, BUNDLED};
use algebroid_lab::oracle::{bounded_membership, monomials_up_to};
use algebroid_lab::run::{run_scenario, RunOptions};
use algebroid_lab::scenario::{parse_scenario, CheckSpec, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PSI_SAMPLES: usize = 25;
const ORACLE_INSTANCES: usize = 100;
const ORACLE_SEED: u64 = 0;
const ORACLE_MAX_RANK: usize = 3;
const ORACLE_MAX_DEGREE: u32 = 3;
/// The oracle searches cofactors up to `deg(v) + ORACLE_SLACK`.
const ORACLE_SLACK: u32 = 3;
const COURANT_SAMPLES: usize = 50;
const SCENARIO_LIMIT: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn bundled(name: &str) -> Scenario {
    parse_scenario(lookup(name).expect("bundled scenario").text).expect("bundled scenarios parse")
}

fn fields(chart: &Chart, fs: &[&str]) -> SubmodulePresentation {
    SingularFoliation::parse(chart, fs).unwrap().module().clone()
}

/// Coefficients in `Contained` must rebuild every generator of `inner`.
fn reproduces(c: &Containment, inner: &SubmodulePresentation, outer: &SubmodulePresentation) -> bool {
    match c {
        Containment::Contained(coeffs) => coeffs.iter().zip(inner.generators()).all(|(h, g)| {
            combine(outer.ring(), outer.ambient_rank(), h, outer.generators()) == *g
        }),
        _ => false,
    }
}

fn criterion_1() -> Outcome {
    let mut done = Vec::new();
    for name in ["pullback_identity", "pullback_axis", "pullback_diagonal"] {
        let s = bundled(name);
        for c in &s.checks {
            let CheckSpec::PullbackFoliation { map, algebroid } = &c.spec else { continue };
            if c.expect != "equal" {
                continue;
            }
            let samples = default_samples(map.source().dim());
            let r = verify_pullback_foliation_identity(map, algebroid, &samples).map_err(err)?;
            ensure(r.hypothesis.is_constant(), || format!("{name}/{}: smoothness not certified: {}", c.name, r.hypothesis))?;
            ensure(r.equal(), || format!("{name}/{}: foliations differ", c.name))?;
            let (a, b) = (r.anchored.module(), r.pulled_back.module());
            ensure(reproduces(&r.equality.a_in_b, a, b) && reproduces(&r.equality.b_in_a, b, a), || {
                format!("{name}/{}: coefficient witnesses do not rebuild the generators", c.name)
            })?;
            let again = verify_pullback_foliation_identity(map, algebroid, &samples).map_err(err)?;
            ensure(format!("{again:?}") == format!("{r:?}"), || format!("{name}/{}: rerun differs", c.name))?;
            done.push(format!("{name}/{}", c.name));
        }
    }
    ensure(done.len() >= 3, || format!("only {} certified scenarios", done.len()))?;
    Ok(format!("{} certified pullbacks with equal foliations: {}", done.len(), done.join(", ")))
}

fn criterion_2() -> Outcome {
    let s = bundled("dirac_jumping");
    let (f, l) = (&s.maps["f"], &s.dirac["L"]);
    let m = l.chart();
    let fl = fields(m, &["d/dx1", "d/dx2", "x3*d/dx3", "x3*d/dx4"]);
    ensure(submodule_equal(l.foliation().module(), &fl).map_err(err)?.is_equal(), || "F_L has the wrong generators".into())?;
    let r = verify_dirac_identities(f, l, None).map_err(err)?;
    let b = f.source().ring();
    let p = |e: &str| Poly::parse(b, e).unwrap();
    let expected = vec![p("1"), p("0"), p("2*x"), p("2*x")];
    ensure(r.pushed_witness.as_ref() == Some(&expected), || format!("pushed witness {:?}", r.pushed_witness))?;
    ensure(r.strict(), || "containment is not certified strict".into())?;
    let o = r.obstruction.as_ref().ok_or("no component obstruction")?;
    ensure(o.reduced_element == p("2") && o.reduced_ideal == vec![p("x")], || {
        format!("obstruction equation {} in {:?}", o.reduced_element, o.reduced_ideal)
    })?;
    match &o.result {
        MembershipResult::RefutedAtPoint { point, .. } if point[0] == rat(0) => {}
        other => return Err(format!("obstruction verdict {}", other.tag())),
    }
    Ok("f_* d/dx = d/dx1 + 2x d/dx3 + 2x d/dx4; 2 = h*x refuted at x = 0; preimage foliation strictly smaller".into())
}

fn criterion_3() -> Outcome {
    let s = bundled("so3_blowdown");
    let report = run_scenario(&s, &RunOptions::default());
    for c in &report.checks {
        ensure(c.passed, || format!("{}: {} (expected {}) {:?}", c.name, c.outcome, c.expected, c.mismatches))?;
    }
    let blowdown = s.checks.iter().find(|c| matches!(c.spec, CheckSpec::DiracBlowdown { .. })).ok_or("no blowdown check")?;
    let CheckSpec::DiracBlowdown { setup, dirac, lifted } = &blowdown.spec else { unreachable!() };
    for (chart, span) in setup.atlas.charts().iter().zip(lifted) {
        let id = verify_dirac_identities(chart.blowdown(), dirac, Some(span)).map_err(err)?;
        let eq = id.preimage_vs_backward.as_ref().ok_or("no comparison")?;
        ensure(eq.is_equal() && dirac_check(span).passes(3), || format!("{}: lifted span fails", chart.chart().name()))?;
    }
    Ok(format!(
        "rank 3 generically and 1 on the divisor in {} charts; lifted spans are Dirac with the preimage foliation",
        setup.atlas.charts().len()
    ))
}

fn criterion_4() -> Outcome {
    let mut passed = Vec::new();
    for name in ["psi_two_form_axis", "psi_poisson_diagonal", "psi_identity"] {
        let s = bundled(name);
        let report = run_scenario(&s, &RunOptions::default());
        for (c, r) in s.checks.iter().zip(&report.checks) {
            if !matches!(c.spec, CheckSpec::PsiIsomorphism { .. }) || c.expect != "pass" {
                continue;
            }
            ensure(r.outcome == "pass", || format!("{name}/{}: {} ({})", c.name, r.outcome, r.detail))?;
            let w = &r.witness;
            ensure(
                w["anchor_preserved"] == true
                    && w["image_rank"]["verdict"] == "constant_rank"
                    && w["bracket_failure"].is_null()
                    && w["injectivity_failure"].is_null()
                    && w["injectivity_samples"] == PSI_SAMPLES,
                || format!("{name}/{}: witness {w}", c.name),
            )?;
            passed.push(format!("{name}/{}", c.name));
        }
    }
    ensure(passed.len() >= 2, || format!("only {} transverse scenarios", passed.len()))?;
    Ok(format!("all four checks hold on {}", passed.join(", ")))
}

fn per_chart(atlas: &BlowupAtlas, gens: &[&str]) -> ChartwiseModule {
    let modules = atlas.charts().iter().map(|c| fields(c.chart(), gens)).collect();
    ChartwiseModule::new(atlas, modules).unwrap()
}

fn criterion_5() -> Outcome {
    let cases: [(usize, usize, SubalgebroidSpec, &[&str], &str); 2] = [
        (2, 2, SubalgebroidSpec::Zero, &["u*d/du", "d/dv"], "plane at the origin"),
        (3, 2, SubalgebroidSpec::Kernel, &["u*d/dx", "u*d/du", "d/dv"], "space along the x-axis"),
    ];
    let mut notes = Vec::new();
    for (n, k, spec, expected, label) in cases {
        let atlas = blowup_atlas(n, k).map_err(err)?;
        let a = AlgebroidPresentation::tangent(atlas.ambient());
        let c = resolve_subalgebroid(&a, &atlas, &spec).map_err(err)?;
        ensure(c.generators().iter().all(|g| g.iter().all(|p| p.is_zero())), || format!("{label}: C is not zero"))?;
        let r = verify_blup_identities(&a, &c, &atlas).map_err(err)?;
        ensure(r.equal(), || format!("{label}: lift and intersection constructions differ"))?;
        let target = per_chart(&atlas, expected);
        let eq = r.intersection.equality(&target).map_err(err)?;
        ensure(eq.iter().all(|e| e.is_equal()), || format!("{label}: result is not <{}>", expected.join(", ")))?;
        notes.push(format!("{label} = <{}>", expected.join(", ")));
    }
    Ok(notes.join("; "))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for (n, k, euler, bad) in [(2, 2, "x*d/dx + y*d/dy", "d/dx"), (3, 2, "y*d/dy + z*d/dz", "d/dy")] {
        let atlas = blowup_atlas(n, k).map_err(err)?;
        let failures = atlas.transition_failures().map_err(err)?;
        ensure(failures.is_empty(), || format!("{n}/{k}: transitions fail at {failures:?}"))?;
        let m = atlas.ambient();
        let lifts = lift_vector_field(&atlas, &VectorFieldPoly::parse(m, euler).unwrap()).map_err(err)?;
        for (chart, l) in atlas.charts().iter().zip(&lifts) {
            let want = VectorFieldPoly::parse(chart.chart(), "u*d/du").unwrap();
            ensure(*l == want, || format!("{}: Euler lift is {l}", chart.chart().name()))?;
        }
        match lift_vector_field(&atlas, &VectorFieldPoly::parse(m, bad).unwrap()) {
            Err(Error::NotTangentToCenter { .. }) => {}
            other => return Err(format!("{bad} on {n}/{k}: {other:?}")),
        }
        notes.push(format!("R^{n} codim {k}: {} transitions exact", atlas.transitions().len()));
    }
    Ok(format!("{}; Euler lifts to u*d/du; d/dx not tangent at the origin", notes.join(", ")))
}

fn random_poly(rng: &mut ChaCha8Rng, ring: &RingRef, max_deg: u32) -> Poly {
    let monos = monomials_up_to(ring.nvars(), max_deg);
    let mut terms = Vec::new();
    for m in monos {
        if rng.gen_bool(0.35) {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            terms.push((m, rat(sign * rng.gen_range(1..=3))));
        }
    }
    Poly::from_terms(ring, terms)
}

fn criterion_7() -> Outcome {
    let ring = Ring::new(&["x", "y"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let (mut members, mut disagreements) = (0, Vec::new());
    for i in 0..ORACLE_INSTANCES {
        let rank = rng.gen_range(1..=ORACLE_MAX_RANK);
        let ngens = rng.gen_range(1..=3);
        let gens: Vec<Vec<Poly>> = (0..ngens)
            .map(|_| {
                (0..rank)
                    .map(|_| {
                        let d = rng.gen_range(0..=ORACLE_MAX_DEGREE);
                        random_poly(&mut rng, &ring, d)
                    })
                    .collect()
            })
            .collect();
        let module = SubmodulePresentation::new(&ring, rank, gens.clone()).unwrap();
        let v: Vec<Poly> = if rng.gen_bool(0.5) {
            let h: Vec<Poly> = (0..ngens).map(|_| random_poly(&mut rng, &ring, 1)).collect();
            combine(&ring, rank, &h, &gens)
        } else {
            (0..rank).map(|_| random_poly(&mut rng, &ring, ORACLE_MAX_DEGREE)).collect()
        };
        let deg = v.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        let gb = module_membership(&v, &module).map_err(err)?;
        let oracle = bounded_membership(&v, &module, deg + ORACLE_SLACK);
        if let MembershipResult::InModule(h) = &gb {
            members += 1;
            if combine(&ring, rank, h, &gens) != v {
                disagreements.push(format!("#{i}: GB coefficients do not rebuild v"));
            }
        }
        match (&oracle, gb.is_member()) {
            (Some(h), _) if combine(&ring, rank, h, &gens) != v => disagreements.push(format!("#{i}: oracle solution wrong")),
            (Some(_), true) | (None, false) => {}
            (o, g) => disagreements.push(format!("#{i}: gb member {g}, oracle member {}", o.is_some())),
        }
    }
    ensure(disagreements.is_empty(), || disagreements.join("; "))?;
    Ok(format!("{ORACLE_INSTANCES} instances (seed {ORACLE_SEED}, {members} members), zero disagreements"))
}

fn random_section(rng: &mut ChaCha8Rng, c: &Chart) -> Section {
    let r = c.ring();
    let v: Vec<Poly> = (0..c.dim()).map(|_| random_poly(rng, r, 2)).collect();
    let f: Vec<Poly> = (0..c.dim()).map(|_| random_poly(rng, r, 2)).collect();
    Section::new(VectorFieldPoly::new(c, v).unwrap(), OneFormPoly::new(c, f).unwrap()).unwrap()
}

fn criterion_8() -> Outcome {
    let c = Chart::new("M", &["x", "y"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    for i in 0..COURANT_SAMPLES {
        let (a, b) = (random_section(&mut rng, &c), random_section(&mut rng, &c));
        let ab = courant_bracket(&a, &b).map_err(err)?;
        let ba = courant_bracket(&b, &a).map_err(err)?;
        ensure(
            ab.vector.add(&ba.vector).is_zero() && ab.form.add(&ba.form) == OneFormPoly::exact(c.ring(), &pairing(&a, &b)),
            || format!("Courant sample {i} is not skew up to d<a,b>"),
        )?;
    }

    let (mut spans, mut structures, mut blowups) = (0, 0, 0);
    for b in BUNDLED {
        let s = parse_scenario(b.text).map_err(|d| format!("{}: {d:?}", b.name))?;
        for (name, l) in &s.dirac {
            let verdict = dirac_check(l).involutivity;
            ensure(verdict.is_verified(), || format!("{}/{name}: Courant involutivity {}", b.name, verdict.tag()))?;
            structures += 1;
        }
        for c in &s.checks {
            if let CheckSpec::BackwardImage { map, dirac, .. } | CheckSpec::PsiIsomorphism { map, dirac } = &c.spec {
                if let Some(span) = backward_span(map, dirac)? {
                    spans += 1;
                    ensure(isotropy_failure(span.generators()).is_none(), || format!("{}/{}: backward image not isotropic", b.name, c.name))?;
                }
            }
        }
        for (name, setup) in &s.blowups {
            let a = &setup.algebroid;
            let cc = resolve_subalgebroid(a, &setup.atlas, &setup.subalgebroid).map_err(err)?;
            let Ok(blup) = blup_foliation_intersection(a, &cc, &setup.atlas) else { continue };
            let bt = b_tangent_module(&setup.atlas);
            for (i, m) in blup.modules().iter().enumerate() {
                ensure(contains(bt.module(i), m).map_err(err)?.holds(), || format!("{}/{name}: chart {i} leaves the b-tangent module", b.name))?;
            }
            blowups += 1;
        }
    }
    Ok(format!(
        "{COURANT_SAMPLES} Courant samples; {spans} backward images isotropic; {structures} bundled Dirac spans involutive; \
         {blowups} blown-up foliations tangent to the divisor"
    ))
}

fn backward_span(map: &PolyMap, dirac: &DiracSpan) -> Result<Option<DiracSpan>, String> {
    Ok(backward_image(map, dirac).map_err(err)?.span)
}

fn scenario_times() -> Result<(), String> {
    for b in BUNDLED {
        let s = parse_scenario(b.text).map_err(|d| format!("{}: {d:?}", b.name))?;
        let t = Instant::now();
        run_scenario(&s, &RunOptions::default());
        ensure(t.elapsed() < SCENARIO_LIMIT, || format!("{} took {:?}", b.name, t.elapsed()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("pullback foliation identity on certified pullbacks", criterion_1),
        ("jumping backward image: strict containment with witness", criterion_2),
        ("so(3)* blowdown: rank jump and lifted Dirac span", criterion_3),
        ("psi isomorphism on transverse maps", criterion_4),
        ("blown-up foliation: two constructions agree", criterion_5),
        ("blowup atlas soundness and lifts", criterion_6),
        ("Groebner membership agrees with the dense oracle", criterion_7),
        ("invariant suite", criterion_8),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (label, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match r {
            Ok(detail) => println!("criterion {}: PASS  {label} ({ms} ms): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {label} ({ms} ms): {why}", i + 1);
            }
        }
    }
    if let Err(why) = scenario_times() {
        failed += 1;
        println!("time limit: FAIL  {why}");
    }
    println!("acceptance: {}/{} criteria passed in {:.1} s", 8 - failed.min(8), 8, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
