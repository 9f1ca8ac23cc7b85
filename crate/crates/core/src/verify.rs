//! Symbolic and numerical certification of a computed conjugacy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{LinearMap2, PlanarField};
use crate::hamiltonian::HamiltonianNF;
use crate::scalar::{Alg, Rat, Scalar};
use crate::series::{Axis, Series2, SeriesError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("integration diverged at step {step}")]
    Divergence { step: usize },
    #[error("no return to the section within {steps} steps")]
    NoReturn { steps: usize },
    #[error("{0} has non-real coefficients")]
    NotReal(&'static str),
    #[error("time step must be positive, got {0}")]
    BadStep(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Map2<T> = (Series2<T>, Series2<T>);

/// `Dh·X − Y∘h` through order `order`.
pub fn conjugacy_residual<T: Scalar>(
    x: &PlanarField<T>,
    h: &Map2<T>,
    y: &PlanarField<T>,
    order: usize,
) -> Result<Map2<T>, SeriesError> {
    let (p, q) = (x.p().with_order(order), x.q().with_order(order));
    let (y1, y2) = (y.p().with_order(order), y.q().with_order(order));
    let (h1, h2) = (h.0.with_order(order), h.1.with_order(order));
    let lhs = |hi: &Series2<T>| {
        let du = hi.partial(Axis::First).with_order(order);
        let dv = hi.partial(Axis::Second).with_order(order);
        du.mul_to(&p, order).add(&dv.mul_to(&q, order))
    };
    let r1 = lhs(&h1).sub(&y1.compose_pair(&h1, &h2)?);
    let r2 = lhs(&h2).sub(&y2.compose_pair(&h1, &h2)?);
    Ok((r1, r2))
}

/// `h∘R − R∘h`.
pub fn equivariance_residual<T: Scalar>(h: &Map2<T>, r: &LinearMap2<T>) -> Map2<T> {
    let (a1, a2) = (h.0.linear_subst(r), h.1.linear_subst(r));
    let (b1, b2) = r.apply_series(&h.0, &h.1);
    (a1.sub(&b1), a2.sub(&b2))
}

/// Largest `d` such that the residual has no terms of degree `≤ d`; the order when it vanishes.
pub fn residual_clean_degree<T: Scalar>(residual: &Map2<T>) -> usize {
    let order = residual.0.order().min(residual.1.order());
    [&residual.0, &residual.1].iter().filter_map(|s| s.valuation()).min().map_or(order, |v| v.saturating_sub(1))
}

/// Classical fourth-order Runge–Kutta; returns `steps + 1` states including `q0`.
pub fn integrate_rk4(
    x: &PlanarField<f64>,
    q0: (f64, f64),
    dt: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>, VerifyError> {
    if !(dt > 0.0) {
        return Err(VerifyError::BadStep(dt));
    }
    let f = |s: (f64, f64)| x.value_at(s.0, s.1);
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = q0;
    out.push(s);
    for step in 1..=steps {
        let k1 = f(s);
        let k2 = f((s.0 + 0.5 * dt * k1.0, s.1 + 0.5 * dt * k1.1));
        let k3 = f((s.0 + 0.5 * dt * k2.0, s.1 + 0.5 * dt * k2.1));
        let k4 = f((s.0 + dt * k3.0, s.1 + dt * k3.1));
        s = (
            s.0 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            s.1 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        if !(s.0.is_finite() && s.1.is_finite()) {
            return Err(VerifyError::Divergence { step });
        }
        out.push(s);
    }
    Ok(out)
}

fn apply_map(h: &Map2<f64>, q: (f64, f64)) -> (f64, f64) {
    (h.0.value_at(q.0, q.1), h.1.value_at(q.0, q.1))
}

/// `max_t |h̄(φ_X^t(q0)) − φ_{X_H}^t(h̄(q0))|` in the max norm.
pub fn trajectory_conjugacy_error(
    x: &PlanarField<f64>,
    x_h: &PlanarField<f64>,
    h_bar: &Map2<f64>,
    q0: (f64, f64),
    dt: f64,
    steps: usize,
) -> Result<f64, VerifyError> {
    let orbit = integrate_rk4(x, q0, dt, steps)?;
    let image = integrate_rk4(x_h, apply_map(h_bar, q0), dt, steps)?;
    Ok(orbit
        .iter()
        .zip(&image)
        .map(|(&q, &w)| {
            let hq = apply_map(h_bar, q);
            (hq.0 - w.0).abs().max((hq.1 - w.1).abs())
        })
        .fold(0.0, f64::max))
}

/// Times at which the orbit crosses `{y = 0}` on the side of `x` given by `side`.
fn section_crossings(orbit: &[(f64, f64)], dt: f64, side: f64) -> Vec<f64> {
    let mut times = Vec::new();
    if orbit.first().is_some_and(|q| q.1 == 0.0 && q.0 * side > 0.0) {
        times.push(0.0);
    }
    for (k, w) in orbit.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if a.1 * b.1 < 0.0 || (b.1 == 0.0 && a.1 != 0.0) {
            let s = a.1 / (a.1 - b.1);
            let xc = a.0 + s * (b.0 - a.0);
            if xc * side > 0.0 {
                times.push((k as f64 + s) * dt);
            }
        }
    }
    times
}

/// First-return time to the half-line `{y = 0, sign x = sign x₀}`.
pub fn return_time(x: &PlanarField<f64>, q0: (f64, f64), dt: f64, max_steps: usize) -> Result<f64, VerifyError> {
    let side = if q0.0 >= 0.0 { 1.0 } else { -1.0 };
    let orbit = integrate_rk4(x, q0, dt, max_steps)?;
    let t = section_crossings(&orbit, dt, side);
    match t.as_slice() {
        [a, b, ..] => Ok(b - a),
        _ => Err(VerifyError::NoReturn { steps: max_steps }),
    }
}

/// `(T_X, T_{X_H}, |T_X − T_{X_H}| / T_X)`.
pub fn period_error(
    x: &PlanarField<f64>,
    x_h: &PlanarField<f64>,
    h_bar: &Map2<f64>,
    q0: (f64, f64),
    dt: f64,
    max_steps: usize,
) -> Result<(f64, f64, f64), VerifyError> {
    let tx = return_time(x, q0, dt, max_steps)?;
    let th = return_time(x_h, apply_map(h_bar, q0), dt, max_steps)?;
    Ok((tx, th, (tx - th).abs() / tx))
}

/// `max_t |H(h̄(q_t)) − H(h̄(q₀))|` along the numerical orbit of `X`.
pub fn integral_drift(
    h: &Series2<f64>,
    h_bar: &Map2<f64>,
    x: &PlanarField<f64>,
    q0: (f64, f64),
    dt: f64,
    steps: usize,
) -> Result<f64, VerifyError> {
    let orbit = integrate_rk4(x, q0, dt, steps)?;
    let energy = |q| {
        let w = apply_map(h_bar, q);
        h.value_at(w.0, w.1)
    };
    let e0 = energy(q0);
    Ok(orbit.iter().map(|&q| (energy(q) - e0).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryCheck {
    pub initial: (f64, f64),
    pub horizon: f64,
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodCheck {
    pub initial: (f64, f64),
    pub period_x: f64,
    pub period_xh: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftCheck {
    pub initial: (f64, f64),
    pub max_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub order: usize,
    /// Highest degree through which `Dh̄·X − X_H∘h̄` vanishes; equals `order` on success.
    pub symbolic_residual_max_degree_ok: usize,
    pub equivariance_ok: bool,
    pub trajectory_errors: Vec<TrajectoryCheck>,
    pub period_tests: Vec<PeriodCheck>,
    pub integral_drift: Vec<DriftCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub trajectory: f64,
    pub drift: f64,
    pub period: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { trajectory: 1e-6, drift: 1e-8, period: 1e-6 }
    }
}

impl VerificationReport {
    /// Names of the failed checks; empty when everything passes.
    pub fn failures(&self, tol: &Tolerances) -> Vec<String> {
        let mut out = Vec::new();
        if self.symbolic_residual_max_degree_ok < self.order {
            out.push(format!(
                "symbolic: conjugacy residual nonzero at degree {}",
                self.symbolic_residual_max_degree_ok + 1
            ));
        }
        if !self.equivariance_ok {
            out.push("symbolic: h_bar does not commute with R".to_string());
        }
        for t in &self.trajectory_errors {
            if !(t.max_error < tol.trajectory) {
                out.push(format!("trajectory from {:?}: error {:e}", t.initial, t.max_error));
            }
        }
        for p in &self.period_tests {
            if !(p.relative_error < tol.period) {
                out.push(format!("period from {:?}: relative error {:e}", p.initial, p.relative_error));
            }
        }
        for d in &self.integral_drift {
            if !(d.max_drift < tol.drift) {
                out.push(format!("first integral from {:?}: drift {:e}", d.initial, d.max_drift));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub symbolic: bool,
    pub numeric: bool,
    pub periods: bool,
    pub amplitude: f64,
    pub dt: f64,
    pub horizon: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { symbolic: true, numeric: true, periods: true, amplitude: 1e-2, dt: 1e-3, horizon: 5.0 }
    }
}

/// Runs the configured checks of `h_bar` against the original field and the Hamiltonian normal form.
pub fn verify(
    original: &PlanarField<Rat>,
    h_bar: &Map2<Alg>,
    ham: &HamiltonianNF,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    let order = original.order();
    let mut report = VerificationReport {
        order,
        symbolic_residual_max_degree_ok: order,
        equivariance_ok: true,
        trajectory_errors: Vec::new(),
        period_tests: Vec::new(),
        integral_drift: Vec::new(),
    };
    if opts.symbolic {
        let x = original.map(Alg::from_rat);
        let res = conjugacy_residual(&x, h_bar, &ham.x_h, order)?;
        report.symbolic_residual_max_degree_ok = residual_clean_degree(&res);
        let eq = equivariance_residual(h_bar, &LinearMap2::reflection());
        report.equivariance_ok = eq.0.is_zero() && eq.1.is_zero();
    }
    if !(opts.numeric || opts.periods) {
        return Ok(report);
    }
    let x = original.to_f64().expect("rational field");
    let x_h = ham.x_h.to_f64().ok_or(VerifyError::NotReal("X_H"))?;
    let h = ham.h.to_f64().ok_or(VerifyError::NotReal("H"))?;
    let hb = (
        h_bar.0.to_f64().ok_or(VerifyError::NotReal("h_bar"))?,
        h_bar.1.to_f64().ok_or(VerifyError::NotReal("h_bar"))?,
    );
    let a = opts.amplitude;
    let steps = (opts.horizon / opts.dt).round() as usize;
    if opts.numeric {
        for q0 in [(0.0, a), (a, 0.0)] {
            let err = trajectory_conjugacy_error(&x, &x_h, &hb, q0, opts.dt, steps)?;
            report.trajectory_errors.push(TrajectoryCheck { initial: q0, horizon: opts.horizon, max_error: err });
            let drift = integral_drift(&h, &hb, &x, q0, opts.dt, steps)?;
            report.integral_drift.push(DriftCheck { initial: q0, max_drift: drift });
        }
    }
    if opts.periods && ham.kind.is_center() {
        let omega = ham.kind.modulus().expect("nondegenerate");
        // two linear periods leave room for the nonlinear correction
        let budget = (4.0 * std::f64::consts::PI / omega / opts.dt).ceil() as usize;
        let q0 = (a, 0.0);
        let (tx, th, rel) = period_error(&x, &x_h, &hb, q0, opts.dt, budget)?;
        report.period_tests.push(PeriodCheck { initial: q0, period_x: tx, period_xh: th, relative_error: rel });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalform::compute_normal_form;
    use crate::parser::parse;
    use std::f64::consts::PI;

    fn field(p: &str, q: &str, n: usize) -> PlanarField<Rat> {
        PlanarField::new(parse(p, ("u", "v"), n).unwrap(), parse(q, ("u", "v"), n).unwrap()).unwrap()
    }

    fn ffield(p: &str, q: &str) -> PlanarField<f64> {
        field(p, q, 3).to_f64().unwrap()
    }

    fn id_map<T: Scalar>(n: usize) -> Map2<T> {
        (Series2::var(Axis::First, n), Series2::var(Axis::Second, n))
    }

    #[test]
    fn conjugacy_residual_examples() {
        let x = field("v", "u", 4);
        let r = conjugacy_residual(&x, &id_map(4), &x, 4).unwrap();
        assert!(r.0.is_zero() && r.1.is_zero());
        let y = field("2*v", "2*u", 4);
        let r = conjugacy_residual(&x, &id_map(4), &y, 4).unwrap();
        assert_eq!(r, (parse("-v", ("u", "v"), 4).unwrap(), parse("-u", ("u", "v"), 4).unwrap()));
    }

    #[test]
    fn equivariance_examples() {
        let r = LinearMap2::reflection();
        let e = equivariance_residual(&id_map::<Rat>(3), &r);
        assert!(e.0.is_zero() && e.1.is_zero());
        let h = (parse("u", ("u", "v"), 3).unwrap(), parse("v + u^2", ("u", "v"), 3).unwrap());
        let e = equivariance_residual(&h, &r);
        assert!(e.0.is_zero());
        assert_eq!(e.1, parse("2*u^2", ("u", "v"), 3).unwrap());
    }

    #[test]
    fn pipeline_output_is_exact_conjugacy() {
        let x = field("v + u*v", "u + u^2", 10);
        let nf = compute_normal_form(&x, 10).unwrap();
        let ham = HamiltonianNF::from_result(&nf);
        let opts = VerifyOptions { numeric: false, periods: false, ..Default::default() };
        let rep = verify(&nf.original, &nf.h_bar, &ham, &opts).unwrap();
        assert_eq!(rep.symbolic_residual_max_degree_ok, 10);
        assert!(rep.equivariance_ok);
        assert!(rep.failures(&Tolerances::default()).is_empty());
    }

    #[test]
    fn rk4_rotation_returns() {
        let x = ffield("v", "-u");
        let orbit = integrate_rk4(&x, (1.0, 0.0), 1e-3, 6284).unwrap();
        let t: f64 = 6284.0 * 1e-3;
        let (a, b) = *orbit.last().unwrap();
        assert!((a - t.cos()).abs() < 1e-6 && (b + t.sin()).abs() < 1e-6);
        assert!((a - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rk4_zero_field_is_constant() {
        let x = ffield("0", "0");
        assert!(integrate_rk4(&x, (0.3, -0.2), 0.1, 50).unwrap().iter().all(|&q| q == (0.3, -0.2)));
        assert!(matches!(integrate_rk4(&x, (0.0, 0.0), 0.0, 1), Err(VerifyError::BadStep(_))));
    }

    #[test]
    fn rk4_tracks_hyperbolic_solution() {
        let x = ffield("v", "u");
        let orbit = integrate_rk4(&x, (1.0, 0.0), 1e-4, 10_000).unwrap();
        for (k, &(a, b)) in orbit.iter().enumerate() {
            let t = k as f64 * 1e-4;
            assert!((a - t.cosh()).abs() < 1e-8 && (b - t.sinh()).abs() < 1e-8);
        }
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let x = ffield("v", "-u");
        let err = |dt: f64| {
            let steps = (1.0 / dt).round() as usize;
            let (a, b) = *integrate_rk4(&x, (1.0, 0.0), dt, steps).unwrap().last().unwrap();
            (a - 1f64.cos()).abs().max((b + 1f64.sin()).abs())
        };
        let ratio = err(0.02) / err(0.01);
        assert!((13.0..19.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn divergence_is_reported() {
        let x = ffield("u^2", "0");
        assert!(matches!(integrate_rk4(&x, (1.0, 0.0), 0.1, 100), Err(VerifyError::Divergence { .. })));
    }

    #[test]
    fn harmonic_periods() {
        let id = id_map::<f64>(3);
        let x = ffield("v", "-u");
        let (tx, th, rel) = period_error(&x, &x, &id, (1.0, 0.0), 1e-3, 20_000).unwrap();
        assert!((tx - 2.0 * PI).abs() / (2.0 * PI) < 1e-8 && rel < 1e-8, "{tx} {th}");
        let x2 = ffield("2*v", "-2*u");
        let (tx, _, _) = period_error(&x2, &x2, &id, (0.5, 0.0), 1e-3, 20_000).unwrap();
        assert!((tx - PI).abs() / PI < 1e-8);
        assert!(matches!(return_time(&x, (1.0, 0.0), 1e-3, 100), Err(VerifyError::NoReturn { .. })));
    }

    #[test]
    fn linear_center_conjugacy_is_exact() {
        let x = field("v", "-u", 6);
        let nf = compute_normal_form(&x, 6).unwrap();
        let ham = HamiltonianNF::from_result(&nf);
        let hb = nf.h_bar_f64().unwrap();
        let steps = (2.0 * PI / 1e-3).round() as usize;
        let err =
            trajectory_conjugacy_error(&x.to_f64().unwrap(), &ham.x_h.to_f64().unwrap(), &hb, (0.01, 0.0), 1e-3, steps)
                .unwrap();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn nonlinear_center_preserves_period() {
        let x = field("v + u*v", "-u + u^2 - v^2", 10);
        let nf = compute_normal_form(&x, 10).unwrap();
        let ham = HamiltonianNF::from_result(&nf);
        let opts = VerifyOptions::default();
        let rep = verify(&nf.original, &nf.h_bar, &ham, &opts).unwrap();
        assert!(rep.failures(&Tolerances::default()).is_empty(), "{rep:?}");
        assert!(rep.period_tests[0].relative_error < 1e-6);
    }

    #[test]
    fn trajectory_error_decays_with_amplitude() {
        // low order so truncation dominates rounding
        let x = field("v + u*v", "u + u^2", 3);
        let nf = compute_normal_form(&x, 3).unwrap();
        let ham = HamiltonianNF::from_result(&nf);
        let hb = nf.h_bar_f64().unwrap();
        let (xf, xh) = (x.to_f64().unwrap(), ham.x_h.to_f64().unwrap());
        let errs: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&a| trajectory_conjugacy_error(&xf, &xh, &hb, (a, 0.0), 1e-3, 1000).unwrap())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn drift_examples() {
        let x = field("v", "u", 4);
        let nf = compute_normal_form(&x, 4).unwrap();
        let ham = HamiltonianNF::from_result(&nf);
        let hb = nf.h_bar_f64().unwrap();
        let xf = x.to_f64().unwrap();
        let d = integral_drift(&ham.h.to_f64().unwrap(), &hb, &xf, (0.3, 0.1), 1e-3, 1000).unwrap();
        assert!(d < 1e-10, "{d}");
        assert_eq!(integral_drift(&Series2::zero(4), &hb, &xf, (0.3, 0.1), 1e-3, 1000).unwrap(), 0.0);
    }
}
