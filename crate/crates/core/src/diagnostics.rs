//! Majorant bounds on the recursion and root-test radius estimates.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::normalform::{split_eigen_field, EigenNormalForm, NormalFormError, NormalFormResult};
use crate::scalar::{rat_int, Alg, FieldScalar, Rat, Scalar};
use crate::series::{Axis, Series1, Series2};

/// Scalars with an exact absolute value and order, where defined.
pub trait Ordered: Scalar {
    fn abs_value(&self) -> Option<Self>;
    fn cmp_value(&self, other: &Self) -> Option<Ordering>;
    fn magnitude(&self) -> f64;
}

impl Ordered for Rat {
    fn abs_value(&self) -> Option<Self> {
        Some(num_traits::Signed::abs(self))
    }
    fn cmp_value(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN).abs()
    }
}

impl Ordered for Alg {
    fn abs_value(&self) -> Option<Self> {
        self.abs_real()
    }
    fn cmp_value(&self, other: &Self) -> Option<Ordering> {
        self.cmp_real(other)
    }
    fn magnitude(&self) -> f64 {
        let (re, im) = self.to_complex_f64();
        re.hypot(im)
    }
}

/// Coefficient-wise absolute value; `None` if a coefficient is not real.
pub fn hat_series<T: Ordered>(s: &Series2<T>) -> Option<Series2<T>> {
    let mut out = Series2::zero(s.order());
    for (i, j, c) in s.terms() {
        out.set(i, j, c.abs_value()?);
    }
    Some(out)
}

pub fn hat_series1<T: Ordered>(s: &Series1<T>) -> Option<Series1<T>> {
    let mut out = Series1::zero(s.order());
    for (m, c) in s.terms() {
        out.set(m, c.abs_value()?);
    }
    Some(out)
}

/// Largest of `1/|k − 2j − 1|` and `|k − 2j|/|k − 2j − 1|` over the nonresonant
/// slots of degrees `2..=max(order, 50)`.
pub fn denominator_bound(order: usize) -> Rat {
    let top = order.max(50) as i64;
    let mut c = Rat::zero();
    for k in 2..=top {
        for j in 0..=k {
            let d = k - 2 * j - 1;
            if d == 0 {
                continue;
            }
            let d = rat_int(d.abs());
            c = c.max(rat_int(1) / &d).max(rat_int((k - 2 * j).abs()) / &d);
        }
    }
    c
}

/// Root-test estimate of the radius of convergence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `+∞` serializes as `null`.
    pub radius: f64,
    pub low_confidence: bool,
    /// `(m, |c_m|^{1/m})` for the nonzero coefficients.
    pub root_values: Vec<(usize, f64)>,
}

/// `1/limsup |c_m|^{1/m}` from the magnitudes `c_m`, index = power.
///
/// The limit is extrapolated with a least-squares line in `1/m` through the
/// last three root-test values.
pub fn radius_estimate(magnitudes: &[f64]) -> RadiusEstimate {
    let roots: Vec<(usize, f64)> = magnitudes
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| **c > 0.0 && c.is_finite())
        .map(|(m, c)| (m, c.powf(1.0 / m as f64)))
        .collect();
    if roots.len() < 4 {
        return RadiusEstimate { radius: f64::INFINITY, low_confidence: true, root_values: roots };
    }
    let tail = &roots[roots.len() - 3..];
    let xs: Vec<f64> = tail.iter().map(|(m, _)| 1.0 / *m as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|(_, r)| *r).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let limit = my - slope * mx;
    if limit > 0.0 {
        RadiusEstimate { radius: 1.0 / limit, low_confidence: false, root_values: roots }
    } else {
        RadiusEstimate { radius: f64::INFINITY, low_confidence: true, root_values: roots }
    }
}

pub fn radius_estimate1<T: Ordered>(s: &Series1<T>) -> RadiusEstimate {
    radius_estimate(&s.coeffs().iter().map(Ordered::magnitude).collect::<Vec<_>>())
}

/// Uses the degree-wise maximum `max_j |c_{k−j,j}|` as the `k`-th magnitude.
pub fn radius_estimate2<T: Ordered>(s: &Series2<T>) -> RadiusEstimate {
    let mut mags = vec![0.0f64; s.order() + 1];
    for (i, j, c) in s.terms() {
        mags[i + j] = mags[i + j].max(c.magnitude());
    }
    radius_estimate(&mags)
}

/// `c·s / (1 − c·s)` truncated at the order of `s`, for `s` without constant term.
pub fn geometric_bound<T: Scalar>(s: &Series2<T>, c: &Rat) -> Series2<T> {
    let n = s.order();
    let cs = s.scale_rat(c);
    let mut acc = Series2::zero(n);
    let mut pow = cs.clone();
    while !pow.is_zero() {
        acc = acc.add(&pow);
        pow = pow.mul_to(&cs, n);
    }
    acc
}

/// `s / (1 − c·ĝ(ξη))` truncated at the order of `s`.
pub fn resonant_bound<T: Scalar>(s: &Series2<T>, g_hat: &Series1<T>, c: &Rat) -> Series2<T> {
    let n = s.order();
    let mut gxy = g_hat.compose_into(&Series2::monomial(1, 1, T::one(), n), n).expect("ξη vanishes at the origin");
    gxy.set(0, 0, T::zero());
    let gxy = gxy.scale_rat(c);
    let mut acc = s.clone();
    let mut term = s.clone();
    loop {
        term = term.mul_to(&gxy, n);
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }
    acc
}

/// First `(i, j)` where `|a| ≤ b` fails, or `None` when dominated everywhere.
pub fn first_undominated<T: Ordered>(a: &Series2<T>, b: &Series2<T>) -> Option<(usize, usize)> {
    a.terms().find_map(|(i, j, c)| {
        let ok = c.abs_value().and_then(|x| x.cmp_value(&b.coeff(i, j))).is_some_and(|o| o != Ordering::Greater);
        (!ok).then_some((i, j))
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MajorantReport {
    pub c: Rat,
    /// `|ã/λ|`, from the reexpanded coefficients `ã` of `f₁∘h`.
    pub f_hat: Series2<Alg>,
    pub g_hat: Series1<Alg>,
    pub h_hat: Series2<Alg>,
    /// `c·f̂/(1 − c·f̂)`.
    pub bound_series: Series2<Alg>,
    /// `f̂/(1 − c·ĝ(ξη))`, the bound the recursion itself implies.
    pub resonant_bound: Series2<Alg>,
    /// `|b| ≤ bound_series` and `|g_m| ≤ f̂_{m+1,m}` everywhere.
    pub dominance_ok: bool,
    pub first_violation: Option<(usize, usize)>,
    pub g_dominance_ok: bool,
    pub resonant_dominance_ok: bool,
    pub radius_estimates: BTreeMap<String, RadiusEstimate>,
}

/// Reexpanded coefficients `ã` of `f₁(ξ + h₁, η + h₂)`, all degrees at once.
///
/// The degree-`k` part only involves `h` below degree `k`, so this equals the
/// values the recursion saw degree by degree.
pub fn reexpanded(f1: &Series2<Alg>, nf: &EigenNormalForm) -> Series2<Alg> {
    let n = nf.order;
    let xi = Series2::var(Axis::First, n).add(&nf.h1);
    let eta = Series2::var(Axis::Second, n).add(&nf.h2);
    f1.with_order(n).compose_pair(&xi, &eta).expect("h has no constant term")
}

pub fn majorant_bound(nf: &EigenNormalForm, f1: &Series2<Alg>) -> Option<MajorantReport> {
    let c = denominator_bound(nf.order);
    let lambda_inv = nf.lambda.inv()?;
    let a_hat = reexpanded(f1, nf).scale(&lambda_inv);
    let f_hat = hat_series(&a_hat)?;
    let g_hat = hat_series1(&nf.g)?;
    let h_hat = hat_series(&nf.h1)?;
    let bound_series = geometric_bound(&f_hat, &c);
    let res_bound = resonant_bound(&f_hat, &g_hat, &c);
    let first_violation = first_undominated(&nf.h1, &bound_series);
    let g_dominance_ok =
        g_hat.terms().all(|(m, g)| g.cmp_value(&f_hat.coeff(m + 1, m)).is_some_and(|o| o != Ordering::Greater));
    let resonant_dominance_ok = first_undominated(&nf.h1, &res_bound).is_none();
    let mut radius_estimates = BTreeMap::new();
    radius_estimates.insert("g".to_string(), radius_estimate1(&nf.g));
    radius_estimates.insert("h1".to_string(), radius_estimate2(&nf.h1));
    radius_estimates.insert("f_hat".to_string(), radius_estimate2(&f_hat));
    Some(MajorantReport {
        c,
        f_hat,
        g_hat,
        h_hat,
        bound_series,
        resonant_bound: res_bound,
        dominance_ok: first_violation.is_none() && g_dominance_ok,
        first_violation,
        g_dominance_ok,
        resonant_dominance_ok,
        radius_estimates,
    })
}

/// Majorant report for a pipeline result; `None` if the normalized coefficients are not real.
pub fn majorant_report(result: &NormalFormResult) -> Result<Option<MajorantReport>, NormalFormError> {
    let (_, f1) = split_eigen_field(&result.eigen_field)?;
    Ok(majorant_bound(&result.eigen, &f1))
}
