use std::io::Write;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use revham::field::{first_violation, reversibility_residual, FieldError, Violation};
use revham::report;
use revham::scalar::{rat, Scalar};
use revham::verify::Map2;
use revham::{
    classify, compute_normal_form, majorant_report, Alg, EquilibriumKind, HamiltonianNF, LinearMap2, NormalFormError,
    NormalFormResult, PlanarField, Rat, VerifyOptions,
};

use crate::config::{Format, JobConfig};
use crate::plot;
use crate::Failure;

fn monomial(i: usize, j: usize, vars: (&str, &str)) -> String {
    let pow = |name: &str, e: usize| match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    };
    let parts: Vec<String> = [pow(vars.0, i), pow(vars.1, j)].into_iter().flatten().collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn describe(v: &Violation, vars: (&str, &str)) -> String {
    format!("{} in component {} (coefficient {})", monomial(v.i, v.j, vars), v.component + 1, v.coeff)
}

fn pipeline_error(e: NormalFormError, vars: (&str, &str)) -> anyhow::Error {
    match e {
        NormalFormError::Field(FieldError::NotReversible(v)) => Failure::NotReversible(describe(&v, vars)).into(),
        NormalFormError::Field(FieldError::DegenerateJacobian) | NormalFormError::DegenerateJacobian => {
            Failure::Degenerate.into()
        }
        other => other.into(),
    }
}

/// Writes a JSON document to the configured file, or stdout.
fn emit(cfg: &JobConfig, doc: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)? + "\n";
    match &cfg.output.path {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn pipeline(cfg: &JobConfig) -> Result<(PlanarField<Rat>, NormalFormResult, HamiltonianNF)> {
    let x = cfg.field()?;
    let nf = compute_normal_form(&x, cfg.order).map_err(|e| pipeline_error(e, cfg.vars()))?;
    let ham = HamiltonianNF::from_result(&nf);
    Ok((x, nf, ham))
}

fn kind_line(kind: &EquilibriumKind) -> String {
    match kind {
        EquilibriumKind::Saddle { lambda_sq, .. } => format!("saddle; lambda^2 = {lambda_sq}"),
        EquilibriumKind::Center { omega_sq, .. } => format!("center; omega^2 = {omega_sq}"),
        EquilibriumKind::Degenerate => "degenerate".into(),
    }
}

pub fn check(cfg: &JobConfig) -> Result<()> {
    let x = cfg.field()?;
    let vars = cfg.vars();
    let r = LinearMap2::reflection();
    let violation = first_violation(&reversibility_residual(&x, &r));
    let outcome = classify(&x, &r);
    let kind = match &outcome {
        Ok(k) => Some(k.clone()),
        Err(_) => None,
    };
    if cfg.output.format.unwrap_or(Format::Text) == Format::Json {
        let doc = json!({
            "schema_version": report::SCHEMA_VERSION,
            "input": report::field(&x, vars),
            "reversible": violation.is_none(),
            "first_violation": violation.as_ref().map(|v| json!({
                "component": v.component + 1,
                "monomial": monomial(v.i, v.j, vars),
                "coefficient": v.coeff,
            })),
            "classification": kind.as_ref().map(report::classification),
        });
        emit(cfg, &doc)?;
    } else {
        let line = match (&violation, &kind) {
            (_, Some(EquilibriumKind::Degenerate)) => "degenerate; det = 0".to_string(),
            (Some(v), _) => format!("not reversible; first violation {}", describe(v, vars)),
            (None, Some(k)) => format!("reversible; {}", kind_line(k)),
            (None, None) => "not classified".to_string(),
        };
        println!("{line}");
    }
    match outcome {
        Ok(EquilibriumKind::Degenerate) => bail!(Failure::Degenerate),
        Ok(_) => Ok(()),
        Err(FieldError::NotReversible(v)) => bail!(Failure::NotReversible(describe(&v, vars))),
        Err(e) => Err(e.into()),
    }
}

fn symbolic_ok(nf: &NormalFormResult, h_bar: &Map2<Alg>, ham: &HamiltonianNF) -> Result<bool> {
    let opts = VerifyOptions { numeric: false, periods: false, ..VerifyOptions::default() };
    let rep = revham::verify(&nf.original, h_bar, ham, &opts)?;
    Ok(rep.symbolic_residual_max_degree_ok == nf.order && rep.equivariance_ok)
}

pub fn normalform(cfg: &JobConfig) -> Result<()> {
    let (_, nf, ham) = pipeline(cfg)?;
    let ok = cfg.verify.symbolic.then(|| symbolic_ok(&nf, &nf.h_bar, &ham)).transpose()?;
    emit(cfg, &report::normal_form(&nf, &ham, cfg.vars(), ok))
}

/// Parses `x:i:j` / `y:i:j` and adds `1/1000` to that coefficient.
fn perturb(h: &mut Map2<Alg>, spec: &str) -> Result<()> {
    let bad = || Failure::Config(format!("--perturb-hbar expects x:i:j or y:i:j, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [comp, i, j] = parts.as_slice() else { bail!(bad()) };
    let (i, j): (usize, usize) = (i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?);
    let s = match *comp {
        "x" => &mut h.0,
        "y" => &mut h.1,
        _ => bail!(bad()),
    };
    if i + j > s.order() {
        bail!(bad());
    }
    let c = s.coeff(i, j).plus(&Alg::from_rat(&rat(1, 1000)));
    s.set(i, j, c);
    Ok(())
}

pub fn verify(cfg: &JobConfig, perturbation: Option<&str>) -> Result<()> {
    let (_, nf, ham) = pipeline(cfg)?;
    let mut h_bar = nf.h_bar.clone();
    if let Some(spec) = perturbation {
        perturb(&mut h_bar, spec)?;
    }
    let rep = revham::verify(&nf.original, &h_bar, &ham, &cfg.verify.options())?;
    let failures = rep.failures(&cfg.verify.tolerances());
    emit(cfg, &report::verification(&rep, &failures))?;
    if failures.is_empty() {
        Ok(())
    } else {
        bail!(Failure::Verification(failures))
    }
}

pub fn plotdata(cfg: &JobConfig) -> Result<()> {
    if !cfg.plot.level_sets && !cfg.plot.trajectories {
        return Ok(());
    }
    let (x, nf, ham) = pipeline(cfg)?;
    let dir = cfg.output.path.clone().unwrap_or_else(|| "plotdata".into());
    let format = cfg.output.format.unwrap_or(Format::Csv);
    let tables = plot::tables(cfg, &x, &nf, &ham)?;
    plot::write(&dir, format, &tables)
}

pub fn diagnose(cfg: &JobConfig) -> Result<()> {
    let (_, nf, _) = pipeline(cfg)?;
    let rep = majorant_report(&nf).map_err(|e| pipeline_error(e, cfg.vars()))?;
    let doc = match rep {
        Some(r) => {
            let mut d = report::majorant(&r);
            d["classification"] = report::classification(nf.kind());
            d["order"] = json!(nf.order);
            d
        }
        None => json!({
            "schema_version": report::SCHEMA_VERSION,
            "classification": report::classification(nf.kind()),
            "error": "normalized coefficients are not real",
        }),
    };
    emit(cfg, &doc)
}
