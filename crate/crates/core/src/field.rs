//! Planar vector fields, linear involutions and the equilibrium at the origin.

use std::cmp::Ordering;

use thiserror::Error;

pub use crate::linear::LinearMap2;
use crate::scalar::{rat_to_f64, FieldScalar, Rat, Scalar};
use crate::series::Series2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("the origin is not a singular point (constant terms {p}, {q})")]
    OriginNotSingular { p: String, q: String },
    #[error("field is not R-reversible: first violation {0}")]
    NotReversible(Violation),
    #[error("classification requires R = diag(1, -1)")]
    UnsupportedInvolution,
    #[error("degenerate Jacobian at the origin (det = 0)")]
    DegenerateJacobian,
}

/// First nonzero monomial of a residual pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 0 for the first component, 1 for the second.
    pub component: usize,
    pub i: usize,
    pub j: usize,
    pub coeff: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "component {} coefficient of u^{} v^{} is {}", self.component + 1, self.i, self.j, self.coeff)
    }
}

/// First offending monomial of a residual, in component-major graded-lex order.
pub fn first_violation<T: Scalar>(residual: &(Series2<T>, Series2<T>)) -> Option<Violation> {
    [&residual.0, &residual.1]
        .iter()
        .enumerate()
        .find_map(|(component, s)| s.terms().next().map(|(i, j, c)| Violation { component, i, j, coeff: c.to_text() }))
}

/// `u̇ = p(u, v), v̇ = q(u, v)` with a singular point at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarField<T> {
    p: Series2<T>,
    q: Series2<T>,
}

impl<T: Scalar> PlanarField<T> {
    /// Both components are truncated to the smaller order.
    pub fn new(p: Series2<T>, q: Series2<T>) -> Result<Self, FieldError> {
        let (p0, q0) = (p.coeff(0, 0), q.coeff(0, 0));
        if !p0.is_zero() || !q0.is_zero() {
            return Err(FieldError::OriginNotSingular { p: p0.to_text(), q: q0.to_text() });
        }
        let n = p.order().min(q.order());
        Ok(PlanarField { p: p.truncate(n), q: q.truncate(n) })
    }

    pub fn p(&self) -> &Series2<T> {
        &self.p
    }

    pub fn q(&self) -> &Series2<T> {
        &self.q
    }

    pub fn components(&self) -> (&Series2<T>, &Series2<T>) {
        (&self.p, &self.q)
    }

    pub fn order(&self) -> usize {
        self.p.order()
    }

    /// Matrix of degree-one coefficients.
    pub fn linear_part(&self) -> LinearMap2<T> {
        LinearMap2::new(self.p.coeff(1, 0), self.p.coeff(0, 1), self.q.coeff(1, 0), self.q.coeff(0, 1))
    }

    pub fn truncate(&self, order: usize) -> Self {
        PlanarField { p: self.p.truncate(order), q: self.q.truncate(order) }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> PlanarField<U> {
        PlanarField { p: self.p.map(f), q: self.q.map(f) }
    }

    pub fn to_f64(&self) -> Option<PlanarField<f64>> {
        Some(PlanarField { p: self.p.to_f64()?, q: self.q.to_f64()? })
    }
}

impl<T: FieldScalar> PlanarField<T> {
    /// The field in coordinates `w` with `(u, v) = M w`: `M⁻¹ X(M w)`.
    pub fn linear_change(&self, m: &LinearMap2<T>) -> Option<Self> {
        let minv = m.inverse()?;
        let p = self.p.linear_subst(m);
        let q = self.q.linear_subst(m);
        let (p, q) = minv.apply_series(&p, &q);
        Some(PlanarField { p, q })
    }
}

impl PlanarField<f64> {
    pub fn value_at(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p.value_at(x, y), self.q.value_at(x, y))
    }
}

/// `DR·X + X∘R`; zero exactly when `X` is `R`-reversible through the truncation order.
pub fn reversibility_residual<T: Scalar>(x: &PlanarField<T>, r: &LinearMap2<T>) -> (Series2<T>, Series2<T>) {
    let (rp, rq) = r.apply_series(&x.p, &x.q);
    (rp.add(&x.p.linear_subst(r)), rq.add(&x.q.linear_subst(r)))
}

pub fn jacobian_origin<T: Scalar>(x: &PlanarField<T>) -> LinearMap2<T> {
    x.linear_part()
}

/// `RA + AR`; zero exactly when `A` anticommutes with `R`.
pub fn anticommute_residual<T: Scalar>(a: &LinearMap2<T>, r: &LinearMap2<T>) -> LinearMap2<T> {
    r.compose(a).add(&a.compose(r))
}

/// Type of the nondegenerate singular point, with the eigenvalue modulus kept as an exact square.
#[derive(Clone, Debug, PartialEq)]
pub enum EquilibriumKind {
    /// Eigenvalues `±iω`.
    Center {
        omega_sq: Rat,
        omega: f64,
    },
    /// Eigenvalues `±λ`.
    Saddle {
        lambda_sq: Rat,
        lambda: f64,
    },
    Degenerate,
}

impl EquilibriumKind {
    pub fn name(&self) -> &'static str {
        match self {
            EquilibriumKind::Center { .. } => "center",
            EquilibriumKind::Saddle { .. } => "saddle",
            EquilibriumKind::Degenerate => "degenerate",
        }
    }

    pub fn is_center(&self) -> bool {
        matches!(self, EquilibriumKind::Center { .. })
    }

    pub fn is_saddle(&self) -> bool {
        matches!(self, EquilibriumKind::Saddle { .. })
    }

    /// `ω²` or `λ²`.
    pub fn modulus_sq(&self) -> Option<&Rat> {
        match self {
            EquilibriumKind::Center { omega_sq, .. } => Some(omega_sq),
            EquilibriumKind::Saddle { lambda_sq, .. } => Some(lambda_sq),
            EquilibriumKind::Degenerate => None,
        }
    }

    pub fn modulus(&self) -> Option<f64> {
        match self {
            EquilibriumKind::Center { omega, .. } => Some(*omega),
            EquilibriumKind::Saddle { lambda, .. } => Some(*lambda),
            EquilibriumKind::Degenerate => None,
        }
    }

    /// Kind from the off-diagonal entries of a Jacobian `[[0, β], [γ, 0]]`.
    pub fn from_beta_gamma(beta: &Rat, gamma: &Rat) -> Self {
        let bg = beta * gamma;
        match bg.cmp(&Rat::zero()) {
            Ordering::Greater => EquilibriumKind::Saddle { lambda: rat_to_f64(&bg).sqrt(), lambda_sq: bg },
            Ordering::Less => {
                let w2 = -bg;
                EquilibriumKind::Center { omega: rat_to_f64(&w2).sqrt(), omega_sq: w2 }
            }
            Ordering::Equal => EquilibriumKind::Degenerate,
        }
    }
}

/// Classifies the singular point of an `R`-reversible field, `R = diag(1, -1)`.
///
/// A singular Jacobian is reported as [`EquilibriumKind::Degenerate`] before
/// reversibility is examined. Otherwise reversibility forces the Jacobian into the form `[[0, β], [γ, 0]]`; `βγ > 0`
/// gives a saddle, `βγ < 0` a center (the reversing symmetry excludes foci).
pub fn classify(x: &PlanarField<Rat>, r: &LinearMap2<Rat>) -> Result<EquilibriumKind, FieldError> {
    if *r != LinearMap2::reflection() {
        return Err(FieldError::UnsupportedInvolution);
    }
    let a = jacobian_origin(x);
    if a.det().is_zero() {
        return Ok(EquilibriumKind::Degenerate);
    }
    let residual = reversibility_residual(x, r);
    if let Some(v) = first_violation(&residual) {
        return Err(FieldError::NotReversible(v));
    }
    debug_assert!(a.entry(0, 0).is_zero() && a.entry(1, 1).is_zero());
    Ok(EquilibriumKind::from_beta_gamma(a.entry(0, 1), a.entry(1, 0)))
}
