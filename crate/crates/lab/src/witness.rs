//! JSON encodings of verdicts and certificates.

use algebroid_core::algebra::{fmt_rational, Poly, Rational};
use algebroid_core::charts::{RankCertificate, RankVerdict};
use algebroid_core::foliation::InvolutivityVerdict;
use algebroid_core::submodule::{Containment, MembershipResult, ModuleEquality, SubmodulePresentation};
use serde_json::{json, Value};

pub fn poly(p: &Poly) -> Value {
    Value::String(p.to_string())
}

pub fn vector(v: &[Poly]) -> Value {
    Value::Array(v.iter().map(poly).collect())
}

pub fn point(p: &[Rational]) -> Value {
    Value::Array(p.iter().map(|q| Value::String(fmt_rational(q))).collect())
}

pub fn module(m: &SubmodulePresentation) -> Value {
    Value::Array(m.generators().iter().map(|g| vector(g)).collect())
}

pub fn rank(v: &RankVerdict) -> Value {
    match v {
        RankVerdict::ConstantRank { rank, certificate } => {
            let cert = match certificate {
                RankCertificate::ZeroMatrix => json!({"kind": "zero_matrix"}),
                RankCertificate::ConstantMinor { rows, cols, value } => {
                    json!({"kind": "constant_minor", "rows": rows, "cols": cols, "value": fmt_rational(value)})
                }
                RankCertificate::UnitIdeal { minors, locus_equations } => {
                    json!({"kind": "unit_ideal", "minors": minors, "locus_equations": locus_equations})
                }
                RankCertificate::PositiveMinor { rows, cols, value } => {
                    json!({"kind": "positive_minor", "rows": rows, "cols": cols, "value": value.to_string()})
                }
            };
            json!({"verdict": v.tag(), "rank": rank, "certificate": cert})
        }
        RankVerdict::GenericRank { rank, samples } => json!({"verdict": v.tag(), "rank": rank, "samples": samples}),
        RankVerdict::NotConstantRank {
            generic_rank,
            witness,
            witness_rank,
        } => json!({
            "verdict": v.tag(),
            "generic_rank": generic_rank,
            "witness": point(witness),
            "witness_rank": witness_rank,
        }),
    }
}

pub fn membership(m: &MembershipResult) -> Value {
    match m {
        MembershipResult::InModule(c) => json!({"result": m.tag(), "coefficients": vector(c)}),
        MembershipResult::RefutedAtPoint { point: p, functional } => {
            json!({"result": m.tag(), "point": point(p), "functional": point(functional)})
        }
        MembershipResult::NotPolynomialCombination => json!({"result": m.tag()}),
    }
}

pub fn containment(c: &Containment) -> Value {
    match c {
        Containment::Contained(coeffs) => json!({
            "holds": true,
            "coefficients": Value::Array(coeffs.iter().map(|v| vector(v)).collect()),
        }),
        Containment::Missing { index, element, result } => json!({
            "holds": false,
            "index": index,
            "element": vector(element),
            "membership": membership(result),
        }),
    }
}

/// `first` and `second` name the modules passed to the equality test.
pub fn equality(e: &ModuleEquality) -> Value {
    json!({
        "equal": e.is_equal(),
        "first_in_second": containment(&e.a_in_b),
        "second_in_first": containment(&e.b_in_a),
    })
}

pub fn involutivity(v: &InvolutivityVerdict) -> Value {
    match v {
        InvolutivityVerdict::Verified => json!({"verdict": v.tag()}),
        InvolutivityVerdict::NotVerified { pair, bracket, result } => json!({
            "verdict": v.tag(),
            "pair": [pair.0, pair.1],
            "bracket": bracket.to_string(),
            "membership": membership(result),
        }),
        InvolutivityVerdict::Inconclusive { pair, bracket } => json!({
            "verdict": v.tag(),
            "pair": [pair.0, pair.1],
            "bracket": bracket.to_string(),
        }),
    }
}
