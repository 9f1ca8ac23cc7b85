//! JSON documents for the command-line tool.
//!
//! Every object is a `serde_json::Map`, which keeps keys sorted, and every
//! coefficient table lists nonzero terms in graded-lex order, so output bytes
//! depend only on the input.

use serde_json::{json, Value};

use crate::diagnostics::{MajorantReport, RadiusEstimate};
use crate::field::{EquilibriumKind, LinearMap2, PlanarField};
use crate::hamiltonian::HamiltonianNF;
use crate::normalform::NormalFormResult;
use crate::parser::unparse;
use crate::scalar::{rat_text, Rat, Scalar};
use crate::series::{Series1, Series2};
use crate::verify::VerificationReport;

pub const SCHEMA_VERSION: u32 = 1;

/// `[[i, j, "coef"], …]`.
pub fn table2<T: Scalar>(s: &Series2<T>) -> Value {
    Value::Array(s.to_table().into_iter().map(|(i, j, c)| json!([i, j, c])).collect())
}

/// `[[m, "coef"], …]`.
pub fn table1<T: Scalar>(s: &Series1<T>) -> Value {
    Value::Array(s.to_table().into_iter().map(|(m, c)| json!([m, c])).collect())
}

pub fn matrix<T: Scalar>(m: &LinearMap2<T>) -> Value {
    json!([[m.entry(0, 0).to_text(), m.entry(0, 1).to_text()], [m.entry(1, 0).to_text(), m.entry(1, 1).to_text()]])
}

pub fn classification(kind: &EquilibriumKind) -> Value {
    let mut v = json!({ "kind": kind.name() });
    if let (Some(sq), Some(m)) = (kind.modulus_sq(), kind.modulus()) {
        v["modulus_squared"] = json!(rat_text(sq));
        v["modulus"] = json!(m);
    }
    v
}

pub fn field(x: &PlanarField<Rat>, vars: (&str, &str)) -> Value {
    json!({
        "p": unparse(x.p(), vars),
        "q": unparse(x.q(), vars),
        "variables": [vars.0, vars.1],
        "order": x.order(),
    })
}

/// The `normalform` document. `symbolic_residual_zero` is `None` when the check was not run.
pub fn normal_form(
    result: &NormalFormResult,
    ham: &HamiltonianNF,
    vars: (&str, &str),
    symbolic_residual_zero: Option<bool>,
) -> Value {
    let log: Vec<Value> = result
        .resonance_log()
        .iter()
        .map(|r| {
            json!({
                "degree": r.degree,
                "eliminated": r.eliminated,
                "resonant": r.resonant.as_ref().map(|(m, g)| json!({ "m": m, "g_m": g.to_text() })),
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "input": field(&result.original, vars),
        "classification": classification(result.kind()),
        "mu": result.mu.exact.to_text(),
        "linear_change": {
            "prenormalization": matrix(&result.change.pre_linear),
            "eigenbasis": matrix(&result.change.c),
        },
        "g": table1(result.g()),
        "G": table1(&ham.g),
        "F": table1(&ham.f),
        "H": table2(&ham.h),
        "X_H": { "p": table2(ham.x_h.p()), "q": table2(ham.x_h.q()) },
        "h_bar": { "x": table2(&result.h_bar.0), "y": table2(&result.h_bar.1) },
        "h_eigen": { "h1": table2(&result.eigen.h1), "h2": table2(&result.eigen.h2) },
        "resonance_log": log,
        "symbolic_residual_zero": symbolic_residual_zero,
    })
}

pub fn verification(report: &VerificationReport, failures: &[String]) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": serde_json::to_value(report).expect("plain data"),
        "failures": failures,
        "passed": failures.is_empty(),
    })
}

fn radius(r: &RadiusEstimate) -> Value {
    json!({
        "radius": r.radius.is_finite().then_some(r.radius),
        "low_confidence": r.low_confidence,
        "root_values": r.root_values,
    })
}

pub fn majorant(report: &MajorantReport) -> Value {
    let radii: serde_json::Map<String, Value> =
        report.radius_estimates.iter().map(|(k, v)| (k.clone(), radius(v))).collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "c": rat_text(&report.c),
        "f_hat": table2(&report.f_hat),
        "g_hat": table1(&report.g_hat),
        "h_hat": table2(&report.h_hat),
        "bound_series": table2(&report.bound_series),
        "resonant_bound": table2(&report.resonant_bound),
        "dominance_ok": report.dominance_ok,
        "first_violation": report.first_violation,
        "g_dominance_ok": report.g_dominance_ok,
        "resonant_dominance_ok": report.resonant_dominance_ok,
        "radius_estimates": radii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalform::compute_normal_form;
    use crate::parser::parse;

    fn doc(p: &str, q: &str, n: usize) -> Value {
        let x = PlanarField::new(parse(p, ("u", "v"), n).unwrap(), parse(q, ("u", "v"), n).unwrap()).unwrap();
        let nf = compute_normal_form(&x, n).unwrap();
        let ham = HamiltonianNF::from_result(&nf);
        normal_form(&nf, &ham, ("u", "v"), Some(true))
    }

    #[test]
    fn linear_saddle_document() {
        let d = doc("v", "u", 6);
        assert_eq!(d["schema_version"], json!(1));
        assert_eq!(d["g"], json!([]));
        assert_eq!(d["H"], json!([[2, 0, "-1/2"], [0, 2, "1/2"]]));
        assert_eq!(d["h_bar"]["x"], json!([[1, 0, "1/1"]]));
        assert_eq!(d["h_bar"]["y"], json!([[0, 1, "1/1"]]));
        assert_eq!(d["classification"]["kind"], json!("saddle"));
    }

    #[test]
    fn linear_center_document() {
        let d = doc("v", "-u", 6);
        assert_eq!(d["H"], json!([[2, 0, "1/2"], [0, 2, "1/2"]]));
        assert_eq!(d["classification"]["kind"], json!("center"));
    }

    #[test]
    fn output_is_byte_deterministic() {
        let a = serde_json::to_string(&doc("v + u*v", "u + u^2", 6)).unwrap();
        let b = serde_json::to_string(&doc("v + u*v", "u + u^2", 6)).unwrap();
        assert_eq!(a, b);
        let pos = |k: &str| a.find(&format!("\"{k}\":")).unwrap();
        assert!(
            pos("F") < pos("G")
                && pos("G") < pos("H")
                && pos("g") < pos("h_bar")
                && pos("h_bar") < pos("schema_version")
        );
    }
}
