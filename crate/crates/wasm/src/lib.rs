//! Bindings used by `www/index.html`. Every entry point takes the field as two
//! expression strings and returns a JSON document.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use revham::field::{first_violation, reversibility_residual};
use revham::parser::{parse, unparse};
use revham::report;
use revham::verify::integrate_rk4;
use revham::{classify, compute_normal_form, Alg, HamiltonianNF, LinearMap2, PlanarField, Rat, Series2};

const VARS: (&str, &str) = ("u", "v");

fn field(p: &str, q: &str, order: usize) -> Result<PlanarField<Rat>, String> {
    let p = parse(p, VARS, order).map_err(|e| format!("P: {e}"))?;
    let q = parse(q, VARS, order).map_err(|e| format!("Q: {e}"))?;
    PlanarField::new(p, q).map_err(|e| e.to_string())
}

/// Exact text when every coefficient is rational, decimal otherwise.
fn show(s: &Series2<Alg>, vars: (&str, &str)) -> String {
    if let Some(r) = s.terms().map(|(i, j, c)| c.as_rat().map(|c| (i, j, c))).collect::<Option<Vec<_>>>() {
        return unparse(&Series2::from_terms(s.order(), r), vars);
    }
    let pow = |name: &str, e: usize| match e {
        0 => String::new(),
        1 => format!("*{name}"),
        _ => format!("*{name}^{e}"),
    };
    s.terms()
        .map(|(i, j, c)| format!("{:+.6}{}{}", c.to_complex_f64().0, pow(vars.0, i), pow(vars.1, j)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn check_json(p: &str, q: &str) -> Result<String, String> {
    let x = field(p, q, 16)?;
    let r = LinearMap2::reflection();
    let violation = first_violation(&reversibility_residual(&x, &r));
    let doc = json!({
        "reversible": violation.is_none(),
        "violation": violation.map(|v| json!({"component": v.component + 1, "i": v.i, "j": v.j, "coefficient": v.coeff})),
        "classification": classify(&x, &r).ok().as_ref().map(report::classification),
    });
    Ok(doc.to_string())
}

pub fn normal_form_json(p: &str, q: &str, order: usize) -> Result<String, String> {
    let x = field(p, q, order)?;
    let nf = compute_normal_form(&x, order).map_err(|e| e.to_string())?;
    let ham = HamiltonianNF::from_result(&nf);
    let doc = json!({
        "classification": report::classification(nf.kind()),
        "g": report::table1(nf.g()),
        "H": show(&ham.h, ("x", "y")),
        "h_bar": [show(&nf.h_bar.0, VARS), show(&nf.h_bar.1, VARS)],
    });
    Ok(doc.to_string())
}

/// `H∘h̄` on a `grid × grid` lattice over `[-extent, extent]²` (row-major, `v` outer)
/// and orbits of the original field from `seeds` (flat `[u0, v0, u1, v1, …]`).
pub fn portrait_json(
    p: &str,
    q: &str,
    order: usize,
    extent: f64,
    grid: usize,
    seeds: &[f64],
    horizon: f64,
) -> Result<String, String> {
    let x = field(p, q, order)?;
    let nf = compute_normal_form(&x, order).map_err(|e| e.to_string())?;
    let ham = HamiltonianNF::from_result(&nf);
    let h = ham.h.to_f64().ok_or("H is not real")?;
    let hb = nf.h_bar_f64().ok_or("h_bar is not real")?;
    let n = grid.clamp(2, 400);
    let step = 2.0 * extent / (n - 1) as f64;
    let mut values = Vec::with_capacity(n * n);
    for b in 0..n {
        for a in 0..n {
            let (u, v) = (-extent + a as f64 * step, -extent + b as f64 * step);
            values.push(h.value_at(hb.0.value_at(u, v), hb.1.value_at(u, v)));
        }
    }
    let xf = x.to_f64().ok_or("field is not real")?;
    let dt = 1e-2_f64.min(horizon / 50.0).max(1e-4);
    let steps = (horizon / dt).ceil() as usize;
    let orbits: Vec<Value> = seeds
        .chunks_exact(2)
        .map(|s| {
            let pts = integrate_rk4(&xf, (s[0], s[1]), dt, steps).unwrap_or_default();
            let bound = 4.0 * extent;
            let kept: Vec<[f64; 2]> =
                pts.into_iter().take_while(|q| q.0.abs() <= bound && q.1.abs() <= bound).map(|q| [q.0, q.1]).collect();
            json!(kept)
        })
        .collect();
    let doc = json!({ "grid": n, "extent": extent, "values": values, "orbits": orbits });
    Ok(doc.to_string())
}

#[wasm_bindgen]
pub fn check(p: &str, q: &str) -> Result<String, JsError> {
    check_json(p, q).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = normalForm)]
pub fn normal_form(p: &str, q: &str, order: usize) -> Result<String, JsError> {
    normal_form_json(p, q, order).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = phasePortrait)]
pub fn phase_portrait(
    p: &str,
    q: &str,
    order: usize,
    extent: f64,
    grid: usize,
    seeds: &[f64],
    horizon: f64,
) -> Result<String, JsError> {
    portrait_json(p, q, order, extent, grid, seeds, horizon).map_err(|e| JsError::new(&e))
}
