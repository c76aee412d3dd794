use algebroid_core::algebra::{groebner_basis, normal_form, rat, Ideal, Monomial, MonomialOrder, Poly, PolyMatrix, Rational, Ring, RingRef};
use algebroid_core::blowup::{blowup_atlas, lift_vector_field};
use algebroid_core::charts::{jacobian, Chart, OneFormPoly, PolyMap, VectorFieldPoly};
use algebroid_core::dirac::{courant_bracket, pairing, DiracSpan, Section};
use algebroid_core::submodule::{combine, SubmoduleGb, SubmodulePresentation};
use proptest::prelude::*;

fn monomials(nvars: usize, max_deg: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(nvars)];
    for _ in 0..max_deg {
        let mut next = Vec::new();
        for m in &out {
            for i in 0..nvars {
                let e = m.mul(&Monomial::var(nvars, i));
                if !out.contains(&e) && !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        out.extend(next);
    }
    out
}

fn build(ring: &RingRef, coeffs: &[i64], max_deg: u32) -> Poly {
    let ms = monomials(ring.nvars(), max_deg);
    Poly::from_terms(ring, ms.into_iter().zip(coeffs).map(|(m, &c)| (m, rat(c))))
}

fn coeffs(nvars: usize, max_deg: u32) -> impl Strategy<Value = Vec<i64>> {
    let len = monomials(nvars, max_deg).len();
    prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], len)
}

fn ring2() -> RingRef {
    Ring::new(&["x", "y"]).unwrap()
}

fn point2() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(-4i64..=4, 2).prop_map(|v| v.into_iter().map(rat).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn groebner_basis_generates_the_ideal(a in coeffs(2, 2), b in coeffs(2, 2), order in prop_oneof![Just(MonomialOrder::GRevLex), Just(MonomialOrder::Lex)]) {
        let r = ring2();
        let gens: Vec<Poly> = [build(&r, &a, 2), build(&r, &b, 2)].into_iter().filter(|p| !p.is_zero()).collect();
        let gb = groebner_basis(&gens, order).unwrap();
        for g in &gens {
            prop_assert!(normal_form(g, &gb, order).is_zero());
        }
        let ideal = Ideal::new(&r, gens.clone()).unwrap();
        for g in &gb {
            prop_assert!(ideal.contains(g).unwrap());
        }
    }

    #[test]
    fn pointwise_rank_is_bounded_by_generic_rank(entries in prop::collection::vec(coeffs(2, 1), 6), p in point2()) {
        let r = ring2();
        let polys: Vec<Poly> = entries.iter().map(|c| build(&r, c, 1)).collect();
        let m = PolyMatrix::from_rows(&r, vec![polys[0..3].to_vec(), polys[3..6].to_vec()]).unwrap();
        prop_assert!(m.rank_at(&p).unwrap() <= m.generic_rank());
    }

    #[test]
    fn combinations_are_members(g in prop::collection::vec(coeffs(2, 1), 4), h in prop::collection::vec(coeffs(2, 1), 2)) {
        let r = ring2();
        let gens = vec![vec![build(&r, &g[0], 1), build(&r, &g[1], 1)], vec![build(&r, &g[2], 1), build(&r, &g[3], 1)]];
        let module = SubmodulePresentation::new(&r, 2, gens.clone()).unwrap();
        let hs: Vec<Poly> = h.iter().map(|c| build(&r, c, 1)).collect();
        let elem = combine(&r, 2, &hs, &gens);
        let gb = SubmoduleGb::new(&module);
        let cs = gb.coefficients(&elem);
        prop_assert!(cs.is_some());
        prop_assert_eq!(combine(&r, 2, &cs.unwrap(), &gens), elem);
    }

    #[test]
    fn courant_bracket_is_skew_up_to_exact(v in prop::collection::vec(coeffs(2, 2), 8)) {
        let c = Chart::new("M", &["x", "y"]).unwrap();
        let r = c.ring().clone();
        let p: Vec<Poly> = v.iter().map(|k| build(&r, k, 2)).collect();
        let a = Section::new(VectorFieldPoly::new(&c, p[0..2].to_vec()).unwrap(), OneFormPoly::new(&c, p[2..4].to_vec()).unwrap()).unwrap();
        let b = Section::new(VectorFieldPoly::new(&c, p[4..6].to_vec()).unwrap(), OneFormPoly::new(&c, p[6..8].to_vec()).unwrap()).unwrap();
        let ab = courant_bracket(&a, &b).unwrap();
        let ba = courant_bracket(&b, &a).unwrap();
        prop_assert!(ab.vector.add(&ba.vector).is_zero());
        prop_assert_eq!(ab.form.add(&ba.form), OneFormPoly::exact(&r, &pairing(&a, &b)));
    }

    #[test]
    fn bivector_graphs_are_isotropic(e in coeffs(2, 2)) {
        let c = Chart::new("M", &["x", "y"]).unwrap();
        let r = c.ring().clone();
        let f = build(&r, &e, 2);
        let pi = PolyMatrix::from_rows(&r, vec![vec![Poly::zero(&r), f.clone()], vec![-&f, Poly::zero(&r)]]).unwrap();
        let l = DiracSpan::poisson_graph(&c, &pi).unwrap();
        prop_assert!(algebroid_core::dirac::isotropy_failure(l.generators()).is_none());
    }

    #[test]
    fn jacobian_chain_rule(f in prop::collection::vec(coeffs(1, 2), 2), g in prop::collection::vec(coeffs(2, 2), 2)) {
        let b = Chart::new("B", &["t"]).unwrap();
        let m = Chart::new("M", &["x", "y"]).unwrap();
        let n = Chart::new("N", &["p", "q"]).unwrap();
        let fm = PolyMap::new(&b, &m, f.iter().map(|c| build(b.ring(), c, 2)).collect()).unwrap();
        let gm = PolyMap::new(&m, &n, g.iter().map(|c| build(m.ring(), c, 2)).collect()).unwrap();
        let composed = gm.compose_after(&fm).unwrap();
        let chain = fm.pull_matrix(&jacobian(&gm)).unwrap().mul(&jacobian(&fm)).unwrap();
        prop_assert_eq!(jacobian(&composed), chain);
    }

    #[test]
    fn lifts_are_related_and_preserve_brackets(a in prop::collection::vec(coeffs(2, 2), 2), b in prop::collection::vec(coeffs(2, 2), 2)) {
        let at = blowup_atlas(2, 2).unwrap();
        let m = at.ambient();
        let r = m.ring();
        // fields vanishing at the origin are tangent to the center
        let vanish = |c: &Vec<i64>| {
            let p = build(r, c, 2);
            &p - &Poly::constant(r, p.coeff(&Monomial::one(2)))
        };
        let y1 = VectorFieldPoly::new(m, a.iter().map(vanish).collect()).unwrap();
        let y2 = VectorFieldPoly::new(m, b.iter().map(vanish).collect()).unwrap();
        let l1 = lift_vector_field(&at, &y1).unwrap();
        let l2 = lift_vector_field(&at, &y2).unwrap();
        let l12 = lift_vector_field(&at, &y1.bracket(&y2)).unwrap();
        for (i, chart) in at.charts().iter().enumerate() {
            let p = chart.blowdown();
            prop_assert_eq!(jacobian(p).mul_vec(l1[i].coeffs()).unwrap(), algebroid_core::charts::compose_field(p, &y1).unwrap());
            prop_assert_eq!(l1[i].bracket(&l2[i]), l12[i].clone());
        }
    }
}
