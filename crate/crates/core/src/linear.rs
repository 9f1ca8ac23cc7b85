use std::fmt;

use crate::scalar::{FieldScalar, Rat, Scalar};
use crate::series::Series2;

/// A 2×2 matrix acting on the plane.
#[derive(Clone, PartialEq)]
pub struct LinearMap2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Scalar> LinearMap2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        LinearMap2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn zero() -> Self {
        Self::diag(T::zero(), T::zero())
    }

    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), T::zero(), d)
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(T::from_i64(a), T::from_i64(b), T::from_i64(c), T::from_i64(d))
    }

    /// `R(u, v) = (u, -v)`.
    pub fn reflection() -> Self {
        Self::from_i64(1, 0, 0, -1)
    }

    /// `S(ξ, η) = (η, ξ)`.
    pub fn swap() -> Self {
        Self::from_i64(0, 1, 1, 0)
    }

    pub fn entry(&self, r: usize, c: usize) -> &T {
        &self.m[r][c]
    }

    pub fn compose(&self, o: &Self) -> Self {
        let e = |r: usize, c: usize| self.m[r][0].times(&o.m[0][c]).plus(&self.m[r][1].times(&o.m[1][c]));
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn add(&self, o: &Self) -> Self {
        let e = |r: usize, c: usize| self.m[r][c].plus(&o.m[r][c]);
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let e = |r: usize, c: usize| self.m[r][c].minus(&o.m[r][c]);
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn scale(&self, s: &T) -> Self {
        let e = |r: usize, c: usize| self.m[r][c].times(s);
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn det(&self) -> T {
        self.m[0][0].times(&self.m[1][1]).minus(&self.m[0][1].times(&self.m[1][0]))
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_zero())
    }

    /// `M ≠ id` and `M² = id`.
    pub fn is_involution(&self) -> bool {
        *self != Self::identity() && self.compose(self) == Self::identity()
    }

    pub fn commutes_with(&self, o: &Self) -> bool {
        self.compose(o) == o.compose(self)
    }

    pub fn apply(&self, x: &T, y: &T) -> (T, T) {
        (self.m[0][0].times(x).plus(&self.m[0][1].times(y)), self.m[1][0].times(x).plus(&self.m[1][1].times(y)))
    }

    /// Applies the matrix to a vector of series.
    pub fn apply_series(&self, p: &Series2<T>, q: &Series2<T>) -> (Series2<T>, Series2<T>) {
        (p.scale(&self.m[0][0]).add(&q.scale(&self.m[0][1])), p.scale(&self.m[1][0]).add(&q.scale(&self.m[1][1])))
    }

    /// The map as a pair of linear series `(a u + b v, c u + d v)`.
    pub fn as_series(&self, order: usize) -> (Series2<T>, Series2<T>) {
        let row =
            |r: usize| Series2::from_terms(order.max(1), [(1, 0, self.m[r][0].clone()), (0, 1, self.m[r][1].clone())]);
        (row(0), row(1))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearMap2<U> {
        LinearMap2::new(f(&self.m[0][0]), f(&self.m[0][1]), f(&self.m[1][0]), f(&self.m[1][1]))
    }
}

impl<T: FieldScalar> LinearMap2<T> {
    pub fn inverse(&self) -> Option<Self> {
        let di = self.det().inv()?;
        Some(Self::new(
            self.m[1][1].times(&di),
            self.m[0][1].negate().times(&di),
            self.m[1][0].negate().times(&di),
            self.m[0][0].times(&di),
        ))
    }
}

impl LinearMap2<Rat> {
    pub fn to_f64(&self) -> LinearMap2<f64> {
        self.map(|x| x.to_f64().unwrap_or(f64::NAN))
    }
}

impl<T: Scalar> fmt::Debug for LinearMap2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0].to_text(),
            self.m[0][1].to_text(),
            self.m[1][0].to_text(),
            self.m[1][1].to_text()
        )
    }
}
