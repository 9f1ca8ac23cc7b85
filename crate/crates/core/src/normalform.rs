//! Equivariant normal form of an `R`-reversible field.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`prenormalize_linear`]: an `R`-equivariant linear change `(u, v) = L(u', v')`,
//!    `L = T·diag(1, s)`, bringing the Jacobian to `[[0, μ], [±μ, 0]]` with `μ > 0`;
//! 2. [`to_eigenbasis`]: `(u', v') = C(ξ, η)` diagonalizes the linear part to
//!    `diag(-λ, λ)` (`λ = μ` for saddles, `λ = iμ` for centers) and turns `R`
//!    into the swap `S(ξ, η) = (η, ξ)`;
//! 3. [`run_recursion`]: solves for `h(ξ, η) = (ξ + h₁, η + h₂)` with
//!    `h₂ = h₁∘S` and `g` such that `Dh·Y = X∘h`, where
//!    `Y = (-λξ(1 + g(ξη)), λη(1 + g(ξη)))`. The coefficient of
//!    `ξ^{m+1}η^m` in `h₁` is fixed to zero, which makes `h` and `g` unique;
//! 4. [`compose_full`]: `h̄ = C ∘ h⁻¹ ∘ C⁻¹ ∘ L⁻¹` carries the original field to
//!    the Hamiltonian chart `(x, y) = C(ξ, η)`, where `ξη = (x² ∓ y²)/4`.
//!
//! [`stepwise_oracle`] recomputes stage 3 by explicit push-forward of the field
//! and is used to cross-check the recursion.

use thiserror::Error;

use crate::field::{classify, EquilibriumKind, FieldError, LinearMap2, PlanarField};
use crate::scalar::{rat_to_f64, Alg, FieldScalar, Rat, Scalar};
use crate::series::{Axis, Series1, Series2, SeriesError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalFormError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("degenerate Jacobian at the origin")]
    DegenerateJacobian,
    #[error("truncation order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("eigenbasis field is malformed: {0}")]
    MalformedInput(String),
    #[error("degree-{degree} part does not have the S-reversible pattern")]
    NotReversiblePattern { degree: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Eigenvalue modulus `μ` (`λ` for saddles, `ω` for centers).
#[derive(Clone, Debug, PartialEq)]
pub struct Modulus {
    pub sq: Rat,
    pub exact: Alg,
    pub approx: f64,
}

/// Linear part of the pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenbasisChange {
    /// `(u, v) = pre_linear (u', v')`; diagonal, commutes with `R`.
    pub pre_linear: LinearMap2<Alg>,
    /// `(u', v') = c (ξ, η)`; satisfies `c·S = R·c`.
    pub c: LinearMap2<Alg>,
    pub c_inv: LinearMap2<Alg>,
    pub kind: EquilibriumKind,
}

impl EigenbasisChange {
    /// `(u, v) = pre_linear · c (ξ, η)`.
    pub fn total(&self) -> LinearMap2<Alg> {
        self.pre_linear.compose(&self.c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prenormalized {
    pub field: PlanarField<Alg>,
    pub map: LinearMap2<Alg>,
    pub mu: Modulus,
    pub kind: EquilibriumKind,
}

/// What happened at one degree of the recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeRecord {
    pub degree: usize,
    /// Nonzero non-resonant coefficients removed at this degree.
    pub eliminated: usize,
    /// `(m, g_m)` for odd degrees `2m + 1`.
    pub resonant: Option<(usize, Alg)>,
}

/// Normal form data in eigen coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenNormalForm {
    /// Eigenvalue of the `η` direction.
    pub lambda: Alg,
    /// `g(t) = Σ_{m≥1} g_m t^m` for `2m + 1 ≤ N`.
    pub g: Series1<Alg>,
    /// Nonlinear part of the first component of `h`.
    pub h1: Series2<Alg>,
    /// `h₁∘S`.
    pub h2: Series2<Alg>,
    pub order: usize,
    pub resonance_log: Vec<DegreeRecord>,
}

impl EigenNormalForm {
    /// The full map `(ξ + h₁, η + h₂)`.
    pub fn h_map(&self) -> (Series2<Alg>, Series2<Alg>) {
        let n = self.order;
        (Series2::var(Axis::First, n).add(&self.h1), Series2::var(Axis::Second, n).add(&self.h2))
    }

    /// The normal form field `(-λξ(1 + g(ξη)), λη(1 + g(ξη)))`.
    pub fn target_field(&self) -> PlanarField<Alg> {
        normal_form_field(&self.lambda, &self.g, self.order)
    }
}

/// Everything the pipeline computes.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormResult {
    pub original: PlanarField<Rat>,
    pub change: EigenbasisChange,
    pub mu: Modulus,
    pub eigen_field: PlanarField<Alg>,
    pub eigen: EigenNormalForm,
    /// The conjugacy `(x, y) = h̄(u, v)`.
    pub h_bar: (Series2<Alg>, Series2<Alg>),
    pub order: usize,
}

impl NormalFormResult {
    pub fn kind(&self) -> &EquilibriumKind {
        &self.change.kind
    }

    pub fn g(&self) -> &Series1<Alg> {
        &self.eigen.g
    }

    pub fn resonance_log(&self) -> &[DegreeRecord] {
        &self.eigen.resonance_log
    }

    /// True when every `g_m` has zero imaginary part.
    pub fn g_is_real(&self) -> bool {
        self.eigen.g.coeffs().iter().all(Alg::is_real)
    }

    /// True when every coefficient of `h̄` is real.
    pub fn h_bar_is_real(&self) -> bool {
        self.h_bar.0.terms().chain(self.h_bar.1.terms()).all(|(_, _, c)| c.is_real())
    }

    /// `h̄` as float series.
    pub fn h_bar_f64(&self) -> Option<(Series2<f64>, Series2<f64>)> {
        Some((self.h_bar.0.to_f64()?, self.h_bar.1.to_f64()?))
    }
}

/// `(-λξ(1 + g(ξη)), λη(1 + g(ξη)))` truncated to `order`.
pub fn normal_form_field(lambda: &Alg, g: &Series1<Alg>, order: usize) -> PlanarField<Alg> {
    let xi_eta = Series2::monomial(1, 1, Alg::one(), order);
    let one_plus_g =
        g.compose_into(&xi_eta, order).expect("ξη vanishes at the origin").add(&Series2::constant(Alg::one(), order));
    let p = one_plus_g.mul_to(&Series2::monomial(1, 0, lambda.negate(), order), order);
    let q = one_plus_g.mul_to(&Series2::monomial(0, 1, lambda.clone(), order), order);
    PlanarField::new(p, q).expect("vanishes at the origin")
}

fn embed(x: &PlanarField<Rat>) -> PlanarField<Alg> {
    x.map(Alg::from_rat)
}

/// Equivariant rescaling to the linear part `[[0, μ], [±μ, 0]]`.
pub fn prenormalize_linear(x: &PlanarField<Rat>) -> Result<Prenormalized, NormalFormError> {
    let kind = classify(x, &LinearMap2::reflection())?;
    if kind == EquilibriumKind::Degenerate {
        return Err(NormalFormError::DegenerateJacobian);
    }
    let a = x.linear_part();
    let (beta, gamma) = (a.entry(0, 1).clone(), a.entry(1, 0).clone());
    let flip = beta < Rat::zero();
    let beta_pos = if flip { -beta.clone() } else { beta.clone() };
    let s_sq = num_traits::Signed::abs(&gamma) / &beta_pos;
    let s = Alg::sqrt_of(&s_sq);
    let t = if flip { Alg::from_i64(-1) } else { Alg::one() };
    let map = LinearMap2::diag(t, s.clone());
    let field = embed(x).linear_change(&map).expect("diagonal map with nonzero entries");
    let mu_exact = s.times_rat(&beta_pos);
    let sq = num_traits::Signed::abs(&(&beta * &gamma));
    let mu = Modulus { approx: rat_to_f64(&sq).sqrt(), sq, exact: mu_exact };
    Ok(Prenormalized { field, map, mu, kind })
}

/// The eigenbasis matrix `C`: `[[1, 1], [-1, 1]]` for saddles, `[[1, 1], [-i, i]]` for centers.
pub fn eigen_matrix(kind: &EquilibriumKind) -> LinearMap2<Alg> {
    let e = if kind.is_center() { Alg::i() } else { Alg::one() };
    LinearMap2::new(Alg::one(), Alg::one(), e.negate(), e)
}

/// `(u', v') = C(ξ, η)`; the result has linear part `diag(-λ, λ)` and is `S`-reversible.
pub fn to_eigenbasis(
    x: &PlanarField<Alg>,
    kind: &EquilibriumKind,
) -> (PlanarField<Alg>, LinearMap2<Alg>, LinearMap2<Alg>) {
    let c = eigen_matrix(kind);
    let c_inv = c.inverse().expect("C is invertible");
    let y = x.linear_change(&c).expect("C is invertible");
    (y, c, c_inv)
}

/// Checks the eigenbasis field shape and returns `(λ, f₁)`.
pub(crate) fn split_eigen_field(x: &PlanarField<Alg>) -> Result<(Alg, Series2<Alg>), NormalFormError> {
    let a = x.linear_part();
    let lambda = a.entry(1, 1).clone();
    if lambda.is_zero() || !a.entry(0, 1).is_zero() || !a.entry(1, 0).is_zero() || *a.entry(0, 0) != lambda.negate() {
        return Err(NormalFormError::MalformedInput(format!("linear part {a:?} is not diag(-λ, λ)")));
    }
    let (p, q) = x.components();
    if *q != p.swap_vars().neg() {
        let bad = (2..=x.order())
            .find(|&k| q.homogeneous_part(k).ok() != p.homogeneous_part(k).ok().map(|s| s.swap_vars().neg()))
            .unwrap_or(1);
        return Err(NormalFormError::NotReversiblePattern { degree: bad });
    }
    let lin = Series2::monomial(1, 0, lambda.negate(), x.order());
    Ok((lambda, p.sub(&lin)))
}

/// Solves the homological equation at one degree.
///
/// `xk` is the degree-`k` part of an `S`-reversible field whose linear part is
/// `diag(-μ, μ)`, written `(-Σ a_{k-j,j} ξ^{k-j}η^j, Σ a_{j,k-j} ξ^{k-j}η^j)`.
/// Returns the equivariant `h^k = (h₁ᵏ, h₁ᵏ∘S)` with
/// `b_{k-j,j} = a_{k-j,j} / ((k - 2j - 1)μ)`, and, for `k = 2m + 1`, the resonant
/// coefficient `g_m = a_{m+1,m}/μ` (with `b_{m+1,m} = 0`).
pub fn homological_solve_degree(
    k: usize,
    xk: &(Series2<Alg>, Series2<Alg>),
    mu: &Alg,
) -> Result<(Series2<Alg>, Series2<Alg>, Option<Alg>), NormalFormError> {
    if k < 2 {
        return Err(NormalFormError::MalformedInput(format!("degree {k} < 2")));
    }
    let (p, q) = xk;
    let order = p.order().min(q.order());
    let homogeneous = |s: &Series2<Alg>| s.terms().all(|(i, j, _)| i + j == k);
    if !homogeneous(p) || !homogeneous(q) {
        return Err(NormalFormError::MalformedInput(format!("input is not homogeneous of degree {k}")));
    }
    if q.truncate(order) != p.truncate(order).swap_vars().neg() {
        return Err(NormalFormError::NotReversiblePattern { degree: k });
    }
    let mu_inv = mu.inv().ok_or_else(|| NormalFormError::MalformedInput("μ = 0".into()))?;
    let mut h1 = Series2::zero(order);
    let mut resonant = None;
    for j in 0..=k {
        let a = p.coeff(k - j, j).negate();
        let div = k as i64 - 2 * j as i64 - 1;
        if div == 0 {
            resonant = Some(a.times(&mu_inv));
        } else if !a.is_zero() {
            h1.set(k - j, j, a.times(&mu_inv).div_rat(&Rat::from_integer(div.into())));
        }
    }
    if k % 2 == 1 && resonant.is_none() {
        resonant = Some(Alg::zero());
    }
    let h2 = h1.swap_vars();
    Ok((h1, h2, resonant))
}

/// Graded coefficient recursion for `g` and `h₁`.
///
/// At degree `k`, with `ã` the degree-`k` coefficients of `f₁(h(ξ, η))` (which
/// only involve the already known parts of `h` of degree `< k`):
///
/// ```text
/// λ(2j - k + 1) b_{k-j,j} = ã_{k-j,j} + λ(k - 2j) Σ_{m=1}^{min(k-j,j)} g_m b_{k-j-m,j-m}
/// g_m = -ã_{m+1,m} / λ,   b_{m+1,m} = 0          (k = 2m + 1)
/// ```
///
/// where `b_{1,0} = 1`, `b_{0,1} = 0` account for the identity part of `h`.
pub fn run_recursion(x_eigen: &PlanarField<Alg>, order: usize) -> Result<EigenNormalForm, NormalFormError> {
    if order < 2 {
        return Err(NormalFormError::OrderTooSmall(order));
    }
    let x = x_eigen.truncate(order);
    if x.order() < order {
        return Err(NormalFormError::MalformedInput(format!("field order {} below {order}", x.order())));
    }
    let (lambda, f1) = split_eigen_field(&x)?;
    let lambda_inv = lambda.inv().expect("λ ≠ 0");
    let mut h1 = Series2::zero(order);
    let mut g = Series1::zero((order - 1) / 2);
    let mut log = Vec::with_capacity(order - 1);

    let b_full = |h1: &Series2<Alg>, i: usize, j: usize| -> Alg {
        match (i, j) {
            (1, 0) => Alg::one(),
            (0, 1) => Alg::zero(),
            _ => h1.coeff(i, j),
        }
    };

    for k in 2..=order {
        let xi = Series2::var(Axis::First, k).add(&h1.truncate(k));
        let eta = Series2::var(Axis::Second, k).add(&h1.truncate(k).swap_vars());
        let reexp = f1.truncate(k).compose_unchecked(&xi, &eta, k);
        let resonant_j = (k % 2 == 1).then(|| (k - 1) / 2);

        let mut record = DegreeRecord { degree: k, eliminated: 0, resonant: None };
        if let Some(m) = resonant_j {
            let gm = reexp.coeff(m + 1, m).negate().times(&lambda_inv);
            g.set(m, gm.clone());
            record.resonant = Some((m, gm));
        }
        let mut new_terms = Vec::new();
        for j in 0..=k {
            if Some(j) == resonant_j {
                continue;
            }
            let a_tilde = reexp.coeff(k - j, j);
            if !a_tilde.is_zero() {
                record.eliminated += 1;
            }
            let mut conv = Alg::zero();
            for m in 1..=(k - j).min(j) {
                let gm = g.coeff(m);
                if gm.is_zero() {
                    continue;
                }
                let b = b_full(&h1, k - j - m, j - m);
                if !b.is_zero() {
                    conv = conv.plus(&gm.times(&b));
                }
            }
            let lhs_factor = 2 * j as i64 - k as i64 + 1;
            let kj = k as i64 - 2 * j as i64;
            let rhs = a_tilde.plus(&lambda.times(&conv).times_rat(&Rat::from_integer(kj.into())));
            let b = rhs.times(&lambda_inv).div_rat(&Rat::from_integer(lhs_factor.into()));
            new_terms.push((k - j, j, b));
        }
        for (i, j, b) in new_terms {
            h1.set(i, j, b);
        }
        log.push(record);
    }
    let h2 = h1.swap_vars();
    Ok(EigenNormalForm { lambda, g, h1, h2, order, resonance_log: log })
}

/// `(Dh)⁻¹ · X∘h` truncated to `order`, for `h = id + (h1, h2)` with `h1, h2` of valuation ≥ 2.
pub fn push_forward<T: FieldScalar>(
    x: &PlanarField<T>,
    h1: &Series2<T>,
    h2: &Series2<T>,
    order: usize,
) -> (Series2<T>, Series2<T>) {
    let xi = Series2::var(Axis::First, order).add(&h1.with_order(order));
    let eta = Series2::var(Axis::Second, order).add(&h2.with_order(order));
    let f1 = x.p().compose_unchecked(&xi, &eta, order);
    let f2 = x.q().compose_unchecked(&xi, &eta, order);
    let a = h1.partial(Axis::First).with_order(order);
    let b = h1.partial(Axis::Second).with_order(order);
    let c = h2.partial(Axis::First).with_order(order);
    let d = h2.partial(Axis::Second).with_order(order);
    let one = Series2::constant(T::one(), order);
    let (one_a, one_d) = (one.add(&a), one.add(&d));
    // det(Dh) = 1 + δ, δ(0) = 0
    let delta = one_a.mul(&one_d).sub(&b.mul(&c)).sub(&one);
    let mut inv_det = one.clone();
    let mut term = one.clone();
    for _ in 0..order {
        term = term.mul(&delta).neg();
        if term.is_zero() {
            break;
        }
        inv_det = inv_det.add(&term);
    }
    let y1 = one_d.mul(&f1).sub(&b.mul(&f2)).mul(&inv_det);
    let y2 = c.neg().mul(&f1).add(&one_a.mul(&f2)).mul(&inv_det);
    (y1, y2)
}

/// True when the degree-`k` part of `(p, q)` has normal-form shape: zero for even
/// `k`, and for `k = 2m + 1` only `ξ^{m+1}η^m` in `p` and `-`(same coefficient)`·ξ^mη^{m+1}` in `q`.
pub fn degree_in_normal_form(p: &Series2<Alg>, q: &Series2<Alg>, k: usize) -> bool {
    let resonant = (k % 2 == 1).then(|| (k - 1) / 2);
    for j in 0..=k {
        let (a, b) = (p.coeff(k - j, j), q.coeff(j, k - j));
        if Some(j) == resonant {
            if b != a.negate() {
                return false;
            }
        } else if !a.is_zero() || !b.is_zero() {
            return false;
        }
    }
    true
}

/// One stage of the stepwise construction.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleStage {
    pub degree: usize,
    /// The transformed field before eliminating this degree had normal-form
    /// shape in every degree `2..degree`.
    pub lower_degrees_normal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleRun {
    pub nf: EigenNormalForm,
    pub stages: Vec<OracleStage>,
    /// The final transformed field has normal-form shape in every degree `2..=N`.
    pub final_normal: bool,
    /// The final transformed field equals the normal form built from `g`.
    pub final_matches_target: bool,
}

/// Degree-by-degree construction by explicit change of variables.
///
/// At each degree the current `h` is applied to the field by push-forward,
/// the degree-`k` part of the result is handed to
/// [`homological_solve_degree`], and `h^k` is added to `h`.
pub fn stepwise_oracle(x_eigen: &PlanarField<Alg>, order: usize) -> Result<OracleRun, NormalFormError> {
    if order < 2 {
        return Err(NormalFormError::OrderTooSmall(order));
    }
    let x = x_eigen.truncate(order);
    let (lambda, _) = split_eigen_field(&x)?;
    let mut h1 = Series2::zero(order);
    let mut g = Series1::zero((order - 1) / 2);
    let mut stages = Vec::new();
    let mut log = Vec::new();
    for k in 2..=order {
        let (y1, y2) = push_forward(&x, &h1, &h1.swap_vars(), k);
        let lower_degrees_normal = (2..k).all(|d| degree_in_normal_form(&y1, &y2, d));
        stages.push(OracleStage { degree: k, lower_degrees_normal });
        let yk = (y1.homogeneous_part(k)?, y2.homogeneous_part(k)?);
        let (hk, _, resonant) = homological_solve_degree(k, &yk, &lambda)?;
        let eliminated = yk.0.terms().count() - usize::from(resonant.as_ref().is_some_and(|g| !g.is_zero()));
        let resonant = resonant.map(|gm| ((k - 1) / 2, gm));
        if let Some((m, gm)) = &resonant {
            g.set(*m, gm.clone());
        }
        log.push(DegreeRecord { degree: k, eliminated, resonant });
        h1 = h1.add(&hk.with_order(order));
    }
    let h2 = h1.swap_vars();
    let (y1, y2) = push_forward(&x, &h1, &h2, order);
    let final_normal = (2..=order).all(|d| degree_in_normal_form(&y1, &y2, d));
    let nf = EigenNormalForm { lambda, g, h1, h2, order, resonance_log: log };
    let target = nf.target_field();
    let final_matches_target = target.p() == &y1 && target.q() == &y2;
    Ok(OracleRun { nf, stages, final_normal, final_matches_target })
}

/// Truncated inverse of `id + (n1, n2)` with `n1, n2` of valuation ≥ 2.
pub fn invert_near_identity<T: Scalar>(n1: &Series2<T>, n2: &Series2<T>, order: usize) -> (Series2<T>, Series2<T>) {
    let id1 = Series2::var(Axis::First, order);
    let id2 = Series2::var(Axis::Second, order);
    // S-equivariant input has an S-equivariant inverse: one composition per pass
    let equivariant = *n2 == n1.swap_vars();
    let (mut k1, mut k2) = (id1.clone(), id2.clone());
    // pass p fixes degree p + 1, so it only needs that truncation
    for pass in 1..order {
        let o = pass + 1;
        let (t1, t2) = (k1.truncate(o), k2.truncate(o));
        let c1 = n1.truncate(o).compose_unchecked(&t1, &t2, o).with_order(order);
        let c2 =
            if equivariant { c1.swap_vars() } else { n2.truncate(o).compose_unchecked(&t1, &t2, o).with_order(order) };
        k1 = id1.sub(&c1);
        k2 = id2.sub(&c2);
    }
    (k1, k2)
}

/// `h̄ = C ∘ h⁻¹ ∘ C⁻¹ ∘ L⁻¹`, the conjugacy from the original coordinates to the Hamiltonian chart.
pub fn compose_full(change: &EigenbasisChange, nf: &EigenNormalForm) -> (Series2<Alg>, Series2<Alg>) {
    let n = nf.order;
    let (k1, k2) = invert_near_identity(&nf.h1, &nf.h2, n);
    let to_eigen = change.total().inverse().expect("invertible");
    let k1 = k1.linear_subst(&to_eigen);
    let k2 = k2.linear_subst(&to_eigen);
    change.c.apply_series(&k1, &k2)
}

/// Runs the full pipeline on an `R`-reversible field at truncation order `order`.
pub fn compute_normal_form(x: &PlanarField<Rat>, order: usize) -> Result<NormalFormResult, NormalFormError> {
    if order < 2 {
        return Err(NormalFormError::OrderTooSmall(order));
    }
    let x = x.truncate(order);
    if x.order() < order {
        return Err(NormalFormError::MalformedInput(format!("field order {} below {order}", x.order())));
    }
    let pre = prenormalize_linear(&x)?;
    let (eigen_field, c, c_inv) = to_eigenbasis(&pre.field, &pre.kind);
    let eigen = run_recursion(&eigen_field, order)?;
    let change = EigenbasisChange { pre_linear: pre.map, c, c_inv, kind: pre.kind };
    let h_bar = compose_full(&change, &eigen);
    Ok(NormalFormResult { original: x, change, mu: pre.mu, eigen_field, eigen, h_bar, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::reversibility_residual;
    use crate::parser::parse;
    use crate::scalar::{rat, rat_int};

    fn field(p: &str, q: &str, n: usize) -> PlanarField<Rat> {
        PlanarField::new(parse(p, ("u", "v"), n).unwrap(), parse(q, ("u", "v"), n).unwrap()).unwrap()
    }

    fn a(n: i64) -> Alg {
        Alg::from_i64(n)
    }

    fn ar(n: i64, d: i64) -> Alg {
        Alg::from_rat(&rat(n, d))
    }

    /// Homogeneous S-reversible pair with first component `-Σ a ξ^{k-j} η^j`.
    fn reversible_part(k: usize, coeffs: &[i64]) -> (Series2<Alg>, Series2<Alg>) {
        let p = Series2::from_terms(k, coeffs.iter().enumerate().map(|(j, &c)| (k - j, j, a(-c))));
        let q = p.swap_vars().neg();
        (p, q)
    }

    #[test]
    fn prenormalize_examples() {
        let pre = prenormalize_linear(&field("v", "u", 3)).unwrap();
        assert_eq!(pre.map, LinearMap2::identity());
        assert_eq!(pre.mu.exact, a(1));
        assert_eq!(pre.field, embed(&field("v", "u", 3)));

        let pre = prenormalize_linear(&field("4*v", "u", 3)).unwrap();
        assert_eq!(pre.map, LinearMap2::diag(a(1), ar(1, 2)));
        assert_eq!(pre.field.linear_part(), LinearMap2::from_i64(0, 2, 2, 0));
        assert_eq!(pre.mu.exact, a(2));

        let pre = prenormalize_linear(&field("-v", "-u", 3)).unwrap();
        assert_eq!(pre.field, embed(&field("v", "u", 3)));
        assert_eq!(pre.mu.exact, a(1));

        // irrational scale stays exact
        let x = field("2*v + u*v", "u - u^2", 4);
        let pre = prenormalize_linear(&x).unwrap();
        let s = Alg::sqrt_of(&rat(1, 2));
        assert_eq!(pre.mu.exact, s.times(&a(2)));
        let mu = pre.mu.exact.clone();
        assert_eq!(pre.field.linear_part(), LinearMap2::new(a(0), mu.clone(), mu, a(0)));
        let (r1, r2) = reversibility_residual(&pre.field, &LinearMap2::reflection());
        assert!(r1.is_zero() && r2.is_zero());
        assert!(pre.map.commutes_with(&LinearMap2::reflection()));
    }

    #[test]
    fn eigenbasis_examples() {
        let kind = EquilibriumKind::from_beta_gamma(&rat_int(1), &rat_int(1));
        let (y, c, ci) = to_eigenbasis(&embed(&field("v", "u", 3)), &kind);
        assert_eq!(y.linear_part(), LinearMap2::diag(a(-1), a(1)));
        assert_eq!(c.compose(&ci), LinearMap2::identity());
        assert_eq!(c.compose(&LinearMap2::swap()), LinearMap2::reflection().compose(&c));

        // f₁ = (P - Q)/2 and f₂ = (P + Q)/2 at (ξ + η, -ξ + η)
        let x = field("v + u*v", "u + u^2", 3);
        let (y, _, _) = to_eigenbasis(&embed(&x), &kind);
        let sub = |s: &str| parse(s, ("u", "v"), 3).unwrap().map(Alg::from_rat).linear_subst(&c);
        let f1 = sub("u*v").sub(&sub("u^2")).scale(&ar(1, 2));
        let f2 = sub("u*v").add(&sub("u^2")).scale(&ar(1, 2));
        assert_eq!(y.p().homogeneous_part(2).unwrap(), f1.homogeneous_part(2).unwrap());
        assert_eq!(y.q().homogeneous_part(2).unwrap(), f2.homogeneous_part(2).unwrap());
        assert_eq!(*y.q(), y.p().swap_vars().neg());

        let kind = EquilibriumKind::from_beta_gamma(&rat_int(1), &rat_int(-1));
        let (y, c, _) = to_eigenbasis(&embed(&field("v", "-u", 3)), &kind);
        assert_eq!(y.linear_part(), LinearMap2::diag(Alg::i().negate(), Alg::i()));
        assert_eq!(c.compose(&LinearMap2::swap()), LinearMap2::reflection().compose(&c));
    }

    #[test]
    fn homological_degree_two() {
        let x2 = reversible_part(2, &[1, 2, 3]);
        let (h1, h2, res) = homological_solve_degree(2, &x2, &a(1)).unwrap();
        assert_eq!(h1, Series2::from_terms(2, [(2, 0, a(1)), (1, 1, a(-2)), (0, 2, a(-1))]));
        assert_eq!(h2, h1.swap_vars());
        assert_eq!(res, None);
    }

    #[test]
    fn homological_degree_three() {
        let x3 = reversible_part(3, &[1, 5, 2, 4]);
        let (h1, _, res) = homological_solve_degree(3, &x3, &a(1)).unwrap();
        assert_eq!(h1, Series2::from_terms(3, [(3, 0, ar(1, 2)), (1, 2, a(-1)), (0, 3, a(-1))]));
        assert_eq!(h1.coeff(2, 1), a(0));
        assert_eq!(res, Some(a(5)));
        // scaling by μ divides every coefficient
        let (h1, _, res) = homological_solve_degree(3, &x3, &a(2)).unwrap();
        assert_eq!(h1.coeff(3, 0), ar(1, 4));
        assert_eq!(res, Some(ar(5, 2)));
    }

    #[test]
    fn homological_zero_and_errors() {
        let x = reversible_part(3, &[0, 0, 0, 0]);
        let (h1, _, res) = homological_solve_degree(3, &x, &a(1)).unwrap();
        assert!(h1.is_zero());
        assert_eq!(res, Some(a(0)));
        let (p, _) = reversible_part(2, &[1, 0, 0]);
        let bad = (p.clone(), p);
        assert_eq!(homological_solve_degree(2, &bad, &a(1)), Err(NormalFormError::NotReversiblePattern { degree: 2 }));
    }

    #[test]
    fn recursion_linear_and_idempotent() {
        let lin = normal_form_field(&a(1), &Series1::zero(3), 6);
        let nf = run_recursion(&lin, 6).unwrap();
        assert!(nf.g.is_zero() && nf.h1.is_zero());

        // ξ' = -ξ(1 + ξη), η' = η(1 + ξη)
        let g = Series1::from_coeffs(vec![a(0), a(1), a(0)]);
        let x = normal_form_field(&a(1), &g, 6);
        let nf = run_recursion(&x, 6).unwrap();
        assert_eq!(nf.g, Series1::from_coeffs(vec![a(0), a(1), a(0)]));
        assert!(nf.h1.is_zero());
    }

    #[test]
    fn recursion_matches_oracle_on_example() {
        let x = field("v + u*v", "u + u^2", 7);
        let pre = prenormalize_linear(&x).unwrap();
        let (y, _, _) = to_eigenbasis(&pre.field, &pre.kind);
        let rec = run_recursion(&y, 7).unwrap();
        let orc = stepwise_oracle(&y, 7).unwrap();
        assert_eq!(rec.g, orc.nf.g);
        assert_eq!(rec.h1, orc.nf.h1);
        assert!(orc.final_normal && orc.final_matches_target);
        assert!(orc.stages.iter().all(|s| s.lower_degrees_normal));
        assert!(rec.h1.coeff(2, 1).is_zero() && rec.h1.coeff(3, 2).is_zero());
    }

    #[test]
    fn inverse_map_composes_to_identity() {
        let n = 6;
        let n1 = parse("u^2 - 3*u*v + 1/2*v^3", ("u", "v"), n).unwrap();
        let n2 = parse("v^2*u + 2*u^2", ("u", "v"), n).unwrap();
        let (k1, k2) = invert_near_identity(&n1, &n2, n);
        let h1 = Series2::var(Axis::First, n).add(&n1);
        let h2 = Series2::var(Axis::Second, n).add(&n2);
        assert_eq!(h1.compose_pair(&k1, &k2).unwrap(), Series2::var(Axis::First, n));
        assert_eq!(h2.compose_pair(&k1, &k2).unwrap(), Series2::var(Axis::Second, n));
    }

    #[test]
    fn compose_full_linear_cases() {
        let r = compute_normal_form(&field("v", "u", 4), 4).unwrap();
        assert_eq!(r.h_bar, LinearMap2::<Alg>::identity().as_series(4));

        let change = EigenbasisChange {
            pre_linear: LinearMap2::diag(a(1), a(2)),
            c: eigen_matrix(&EquilibriumKind::Saddle { lambda_sq: rat_int(1), lambda: 1.0 }),
            c_inv: LinearMap2::new(ar(1, 2), ar(-1, 2), ar(1, 2), ar(1, 2)),
            kind: EquilibriumKind::Saddle { lambda_sq: rat_int(1), lambda: 1.0 },
        };
        let nf = run_recursion(&normal_form_field(&a(1), &Series1::zero(1), 4), 4).unwrap();
        let hb = compose_full(&change, &nf);
        assert_eq!(hb, LinearMap2::diag(a(1), ar(1, 2)).as_series(4));
        let r = LinearMap2::<Alg>::reflection();
        let lhs = (hb.0.linear_subst(&r), hb.1.linear_subst(&r));
        assert_eq!(lhs, r.apply_series(&hb.0, &hb.1));
    }

    #[test]
    fn center_coefficients_are_real() {
        let r = compute_normal_form(&field("v + u*v", "-u + u^2 - v^2", 7), 7).unwrap();
        assert!(r.kind().is_center());
        assert!(r.g_is_real());
        assert!(r.h_bar_is_real());
        assert!(!r.g().is_zero());
    }
}
