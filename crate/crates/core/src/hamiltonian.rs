//! The Hamiltonian normal form `H = F(x² + y²)` or `H = -F(x² - y²)` and its vector field.

use crate::field::{EquilibriumKind, PlanarField};
use crate::normalform::NormalFormResult;
use crate::scalar::{rat, Alg, Rat, Scalar};
use crate::series::{Axis, Series1, Series2};

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianNF {
    pub kind: EquilibriumKind,
    /// `G(t) = μ(1 + g(t/4))`.
    pub g: Series1<Alg>,
    /// `F(t) = ½∫₀ᵗ G`.
    pub f: Series1<Alg>,
    /// Order `N + 1`.
    pub h: Series2<Alg>,
    /// `(∂_y H, -∂_x H)`, order `N`.
    pub x_h: PlanarField<Alg>,
}

impl HamiltonianNF {
    pub fn from_result(result: &NormalFormResult) -> Self {
        let g = build_g(result);
        let f = build_f(&g);
        let h = build_h(&f, result.kind(), result.order + 1);
        let x_h = hamiltonian_field(&h);
        HamiltonianNF { kind: result.kind().clone(), g, f, h, x_h }
    }
}

/// `μ(1 + g(t/4))`.
pub fn g_from_normal_form<T: Scalar>(mu: &T, g: &Series1<T>) -> Series1<T> {
    let shifted = g.rescale_arg(&rat(1, 4));
    Series1::constant(T::one(), g.order()).add(&shifted).scale(mu)
}

pub fn build_g(result: &NormalFormResult) -> Series1<Alg> {
    g_from_normal_form(&result.mu.exact, result.g())
}

pub fn build_f<T: Scalar>(g: &Series1<T>) -> Series1<T> {
    g.integrate().map(|c| c.div_rat(&Rat::from_integer(2.into())))
}

/// `F(x² + y²)` for centers, `-F(x² - y²)` otherwise.
pub fn build_h<T: Scalar>(f: &Series1<T>, kind: &EquilibriumKind, order: usize) -> Series2<T> {
    let sign = if kind.is_center() { T::one() } else { T::one().negate() };
    let t = Series2::from_terms(order, [(2, 0, T::one()), (0, 2, sign.clone())]);
    let h = f.compose_into(&t, order).expect("t vanishes at the origin");
    if kind.is_center() {
        h
    } else {
        h.neg()
    }
}

pub fn hamiltonian_field<T: Scalar>(h: &Series2<T>) -> PlanarField<T> {
    let p = h.partial(Axis::Second);
    let q = h.partial(Axis::First).neg();
    PlanarField::new(p, q).expect("H has no linear part")
}

/// `X_H · ∇H`, identically zero through the order of `X_H`.
pub fn first_integral_residual<T: Scalar>(h: &Series2<T>) -> Series2<T> {
    let hx = h.partial(Axis::First);
    let hy = h.partial(Axis::Second);
    hy.mul(&hx).sub(&hx.mul(&hy))
}
