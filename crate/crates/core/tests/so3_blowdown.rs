use algebroid_core::algebra::PolyMatrix;
use algebroid_core::blowup::blowup_atlas;
use algebroid_core::charts::{constant_rank_certificate, default_samples, jacobian, RankVerdict};
use algebroid_core::dirac::{dirac_check, verify_dirac_identities, DiracSpan, Section};

fn so3_graph(at: &algebroid_core::blowup::BlowupAtlas) -> DiracSpan {
    let m = at.ambient();
    let pi = PolyMatrix::parse(m.ring(), &[vec!["0", "z", "-y"], vec!["-z", "0", "x"], vec!["y", "-x", "0"]]).unwrap();
    DiracSpan::poisson_graph(m, &pi).unwrap()
}

fn lifted(at: &algebroid_core::blowup::BlowupAtlas, chart: usize) -> DiracSpan {
    let c = at.charts()[chart].chart();
    let (a, b) = (&c.vars()[1], &c.vars()[2]);
    let s = if chart == 1 { -1 } else { 1 };
    let w = format!("({a}^2 + {b}^2 + 1)");
    let gens = vec![
        Section::parse(c, &format!("{s}*{b}*d/d{a} - {s}*{a}*d/d{b}"), "du").unwrap(),
        Section::parse(c, &format!("-{s}*{b}*u*d/du + {s}*{w}*d/d{b}"), &format!("u*d{a}")).unwrap(),
        Section::parse(c, &format!("{s}*{a}*u*d/du - {s}*{w}*d/d{a}"), &format!("u*d{b}")).unwrap(),
    ];
    DiracSpan::new(c, gens).unwrap()
}

#[test]
fn pullback_rank_jumps_on_the_divisor() {
    let at = blowup_atlas(3, 3).unwrap();
    let l = so3_graph(&at);
    for chart in at.charts() {
        let p = chart.blowdown();
        let m = p.pull_matrix(&l.foliation().module().matrix()).unwrap().hconcat(&jacobian(p)).unwrap();
        match constant_rank_certificate(&m, &default_samples(3)).unwrap() {
            RankVerdict::NotConstantRank { generic_rank, witness, witness_rank } => {
                assert_eq!(generic_rank, 3);
                assert_eq!(witness_rank, 1);
                assert!(num_traits::Zero::is_zero(&witness[0]));
            }
            other => panic!("{other}"),
        }
    }
}

#[test]
fn lifted_span_is_dirac_with_pulled_back_foliation() {
    let at = blowup_atlas(3, 3).unwrap();
    let l = so3_graph(&at);
    for (i, chart) in at.charts().iter().enumerate() {
        let span = lifted(&at, i);
        let check = dirac_check(&span);
        assert!(check.passes(3), "{}: {check:?}", chart.chart().name());
        let report = verify_dirac_identities(chart.blowdown(), &l, Some(&span)).unwrap();
        assert!(report.foliations_agree(), "{}", chart.chart().name());
    }
}
