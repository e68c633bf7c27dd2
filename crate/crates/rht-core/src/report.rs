//! Machine-readable reports: JSON with sorted keys, exact rationals
//! rendered as `p/q` strings, and no environment-dependent content, so
//! identical inputs always serialize to identical bytes.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::cdga::Cdga;
use crate::cohomology::CohomologyError;
use crate::formality::{FormalityReport, MasseyResult, Verdict};
use crate::graded::Element;
use crate::joyce::{AppendixIdentities, AppendixReport};
use crate::scalar::format_scalar;

/// Serializes a value with two-space indentation and a trailing newline.
/// `serde_json` maps are ordered, so the output is canonical.
pub fn to_text(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report values serialize");
    out.push('\n');
    out
}

fn verdict_value(v: &Verdict) -> Value {
    match v {
        Verdict::Formal => json!({ "status": "formal", "certified": true }),
        Verdict::NonFormal(massey) => json!({
            "status": "non-formal",
            "witness": {
                "kind": "massey-product",
                "inputs": massey.inputs.iter().map(Element::render).collect::<Vec<_>>(),
                "degree": massey.degree,
                "representative": massey.representative.render(),
            },
        }),
        Verdict::Inconclusive(why) => json!({ "status": "inconclusive", "residual": why }),
    }
}

/// The JSON form of a formality report: dimension, threshold, per-degree
/// ledger, the union of certificates consumed, and the verdict.
pub fn formality_json(report: &FormalityReport) -> Value {
    let ledger: Vec<Value> = report
        .ledger
        .iter()
        .map(|e| {
            json!({
                "degree": e.degree,
                "ideal_dim": e.ideal_dim,
                "closed_dim": e.closed_dim,
                "method": e.method,
                "certificates": e.certificates,
                "note": e.note,
            })
        })
        .collect();
    let used: BTreeSet<String> =
        report.ledger.iter().flat_map(|e| e.certificates.iter().cloned()).collect();
    json!({
        "dimension": report.dimension,
        "s": report.s,
        "ledger": ledger,
        "certificates_used": used.into_iter().collect::<Vec<_>>(),
        "verdict": verdict_value(&report.verdict),
    })
}

pub fn appendix_json(appendix: &AppendixReport) -> Value {
    let mut dims = Map::new();
    for (d, dim) in &appendix.effective_dims {
        dims.insert(d.to_string(), json!(dim));
    }
    json!({
        "closed_ideal_dim": appendix.closed_ideal_dim,
        "spherical_part_dim": appendix.spherical_part_dim,
        "d1_dim": appendix.quotient_dim,
        "d2_dim": appendix.effective_closed_dim,
        "reported_dim": appendix.reported_quotient_dim,
        "effective_dims": Value::Object(dims),
    })
}

pub fn identities_json(ids: &AppendixIdentities) -> Value {
    let prototypes: Vec<Value> = ids
        .prototypes
        .iter()
        .map(|p| {
            json!({
                "element": p.element,
                "closed_in_effective": p.closed_in_effective,
                "effective_image": p.effective_image,
                "expected_image": p.expected_image,
                "image_matches": p.image_matches,
            })
        })
        .collect();
    json!({
        "prototypes": prototypes,
        "differential_identity": ids.differential_identity,
        "differential_identity_holds": ids.differential_identity_holds,
        "membership_holds": ids.membership_holds,
        "correction_monomials": ids.correction_monomials,
        "corrections_certified": ids.corrections_certified,
    })
}

/// The full case-study report: Betti vector, model shape, formality
/// ledger, and the appendix dimensions (identities when requested).
pub fn joyce_json(
    betti: &[usize],
    report: &FormalityReport,
    appendix: &AppendixReport,
    identities: Option<&AppendixIdentities>,
) -> Value {
    let mut root = match formality_json(report) {
        Value::Object(m) => m,
        _ => unreachable!("formality_json returns an object"),
    };
    root.insert("name".into(), json!("joyce"));
    root.insert("betti".into(), json!(betti));
    root.insert(
        "model".into(),
        json!({ "v2": 12, "v3": 118, "c3": 43, "n3": 75 }),
    );
    root.insert("appendix".into(), appendix_json(appendix));
    if let Some(ids) = identities {
        root.insert("appendix_identities".into(), identities_json(ids));
    }
    Value::Object(root)
}

/// The JSON form of a Massey triple product: inputs, representative, its
/// class coordinates (exact `p/q` strings), the indeterminacy dimension,
/// and the verdict bit.
pub fn massey_json(alg: &Cdga, result: &MasseyResult) -> Result<Value, CohomologyError> {
    let class: Vec<String> = alg
        .class_of_in_degree(&result.representative, result.degree)?
        .iter()
        .map(format_scalar)
        .collect();
    Ok(json!({
        "inputs": result.inputs.iter().map(Element::render).collect::<Vec<_>>(),
        "degree": result.degree,
        "representative": result.representative.render(),
        "representative_class": class,
        "indeterminacy_dim": result.indeterminacy.dim(),
        "vanishes": result.vanishes,
    }))
}

/// Betti numbers as JSON: `{"name": …, "betti": [b0, …, b_max]}`.
pub fn betti_json(name: &str, dims: &[usize]) -> Value {
    json!({ "name": name, "betti": dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdga::heisenberg;
    use crate::formality::triple_massey;
    use crate::graded::Element;
    use crate::joyce;

    #[test]
    fn joyce_report_has_the_contracted_keys_and_is_stable() {
        let report = joyce::joyce_formality();
        let appendix = joyce::appendix_report().unwrap();
        let v = joyce_json(&joyce::joyce_betti(), report, &appendix, None);
        for key in ["verdict", "dimension", "s", "ledger", "certificates_used", "appendix"] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(v["dimension"], 7);
        assert_eq!(v["s"], 3);
        assert_eq!(v["appendix"]["d1_dim"], 96);
        assert_eq!(v["appendix"]["d2_dim"], 96);
        assert_eq!(v["appendix"]["reported_dim"], 76);
        let degrees: Vec<u64> =
            v["ledger"].as_array().unwrap().iter().map(|e| e["degree"].as_u64().unwrap()).collect();
        assert_eq!(degrees, vec![4, 5, 6, 7]);

        // Byte-identical across repeated serialization.
        let again = joyce_json(&joyce::joyce_betti(), report, &appendix, None);
        assert_eq!(to_text(&v), to_text(&again));
    }

    #[test]
    fn massey_report_flags_the_nonvanishing_witness() {
        let alg = heisenberg();
        let ctx = alg.context().clone();
        let x = Element::generator(&ctx, 0);
        let y = Element::generator(&ctx, 1);
        let result = triple_massey(&alg, &x, &x, &y).unwrap();
        let v = massey_json(&alg, &result).unwrap();
        assert_eq!(v["vanishes"], false);
        assert_eq!(v["indeterminacy_dim"], 0);
        assert!(v["representative_class"]
            .as_array()
            .unwrap()
            .iter()
            .any(|s| s.as_str() != Some("0")));
    }
}
