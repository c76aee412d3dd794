//! The closed vocabulary of check kinds and their outcomes.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Involutivity,
    FoliationEqual,
    Membership,
    AlgebroidAxioms,
    PullbackFoliation,
    TransverseRank,
    DiracCheck,
    BackwardImage,
    PsiIsomorphism,
    DiracBlowdown,
    Atlas,
    Lift,
    BlupIdentities,
}

pub struct KindInfo {
    pub kind: CheckKind,
    pub name: &'static str,
    pub outcomes: &'static [&'static str],
    pub keys: &'static str,
    pub summary: &'static str,
}

pub const KINDS: &[KindInfo] = &[
    KindInfo {
        kind: CheckKind::Involutivity,
        name: "involutivity",
        outcomes: &["verified", "not_verified", "inconclusive"],
        keys: "foliation",
        summary: "Brackets every pair of generators and tests membership of the bracket in the module. \
                  A refuting point wins over an undecided membership.",
    },
    KindInfo {
        kind: CheckKind::FoliationEqual,
        name: "foliation_equal",
        outcomes: &["equal", "strict", "not_equal"],
        keys: "foliation, other",
        summary: "Compares two modules of vector fields on one chart. `strict` means the first is \
                  contained in the second and a generator of the second is refuted in the first.",
    },
    KindInfo {
        kind: CheckKind::Membership,
        name: "membership",
        outcomes: &["in_module", "refuted_at_point", "not_polynomial_combination"],
        keys: "foliation, element",
        summary: "Three-valued membership of a coefficient vector in the module generated by a foliation's fields.",
    },
    KindInfo {
        kind: CheckKind::AlgebroidAxioms,
        name: "algebroid_axioms",
        outcomes: &["verified", "not_verified"],
        keys: "algebroid",
        summary: "Anchor compatibility on basis sections and the Jacobi identity on basis triples and \
                  on triples with one coordinate-scaled section.",
    },
    KindInfo {
        kind: CheckKind::PullbackFoliation,
        name: "pullback_foliation",
        outcomes: &["equal", "not_equal", "not_smooth"],
        keys: "map, algebroid",
        summary: "Certifies that [anchor∘f | J_f] has constant rank, then compares the foliation induced \
                  by the pullback algebroid with the preimage foliation. Both sides are computed independently.",
    },
    KindInfo {
        kind: CheckKind::TransverseRank,
        name: "transverse_rank",
        outcomes: &["constant_rank", "generic_rank", "not_constant_rank"],
        keys: "map, one of dirac/algebroid/foliation, optional expect_rank, expect_witness_rank",
        summary: "Rank verdict for [generators∘f | J_f], with a drop witness when the rank is not constant.",
    },
    KindInfo {
        kind: CheckKind::DiracCheck,
        name: "dirac",
        outcomes: &["pass", "fail"],
        keys: "dirac",
        summary: "Isotropy of all generator pairs, rank n with a certificate, and Courant involutivity.",
    },
    KindInfo {
        kind: CheckKind::BackwardImage,
        name: "backward_image",
        outcomes: &["equal", "strict", "not_equal", "no_span"],
        keys: "map, dirac, optional supplied, expect_pushed",
        summary: "Computes the backward image of a Dirac structure and compares its foliation with the preimage \
                  foliation. A strict containment records f_* of the missing field and the refuted component equation.",
    },
    KindInfo {
        kind: CheckKind::PsiIsomorphism,
        name: "psi_isomorphism",
        outcomes: &["pass", "fail", "not_transverse"],
        keys: "map, dirac",
        summary: "For a transverse map: anchor identity, rank of the image equal to dim of the source with a \
                  certificate, exact bracket preservation, and pointwise injectivity on 25 samples.",
    },
    KindInfo {
        kind: CheckKind::DiracBlowdown,
        name: "dirac_blowdown",
        outcomes: &["pass", "fail"],
        keys: "blowup, dirac, lifted (chart -> Dirac structure)",
        summary: "For each blowup chart: the pullback rank jumps on the divisor, the supplied lifted span is \
                  Dirac, and its foliation equals the preimage foliation.",
    },
    KindInfo {
        kind: CheckKind::Atlas,
        name: "atlas",
        outcomes: &["sound", "unsound"],
        keys: "blowup",
        summary: "Checks p_i = p_j∘τ_ij with cleared denominators and that each transition's normal factor \
                  changes sign on the overlap.",
    },
    KindInfo {
        kind: CheckKind::Lift,
        name: "lift",
        outcomes: &["lifted", "not_tangent"],
        keys: "blowup, field, optional expect_lifts (chart -> field)",
        summary: "Solves J_p·X = Y∘p in every chart and certifies exact division.",
    },
    KindInfo {
        kind: CheckKind::BlupIdentities,
        name: "blup_identities",
        outcomes: &["equal", "not_equal", "refused"],
        keys: "blowup, optional expect_module (b_tangent | edge)",
        summary: "Computes the blown-up foliation from lifts of adapted sections and as p^{-1}(F_A) ∩ E_C, and \
                  compares them per chart. Also checks the b-tangent / edge formulas when they apply, divisor \
                  tangency, overlap compatibility and involutivity.",
    },
];

pub fn kind_info(name: &str) -> Option<&'static KindInfo> {
    KINDS.iter().find(|k| k.name == name)
}

pub fn info(kind: CheckKind) -> &'static KindInfo {
    KINDS.iter().find(|k| k.kind == kind).expect("every kind is registered")
}
