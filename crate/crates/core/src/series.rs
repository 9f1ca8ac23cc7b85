//! Truncated power series in one and two variables.
//!
//! Storage is dense by total degree. A [`Series2`] of order `N` holds every
//! coefficient of `u^i v^j` with `i + j ≤ N`, laid out in graded-lexicographic
//! order: degree 0, then `u, v`, then `u², uv, v²`, and so on. Every operation
//! truncates eagerly to the order of its result.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::LinearMap2;
use crate::scalar::{Rat, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("substituted series must have zero constant term")]
    NonzeroConstantTerm,
    #[error("degree {degree} is outside 0..={order}")]
    DegreeOutOfRange { degree: usize, order: usize },
}

/// Which of the two variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    First,
    Second,
}

fn table_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[inline]
fn index(i: usize, j: usize) -> usize {
    let k = i + j;
    k * (k + 1) / 2 + j
}

/// Exponent pairs of degree `k` in graded-lex order.
fn degree_monomials(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=k).map(move |j| (k - j, j))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series2<T> {
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> Series2<T> {
    pub fn zero(order: usize) -> Self {
        Series2 { order, coeffs: vec![T::zero(); table_len(order)] }
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate function `u` or `v`.
    pub fn var(axis: Axis, order: usize) -> Self {
        match axis {
            Axis::First => Self::monomial(1, 0, T::one(), order),
            Axis::Second => Self::monomial(0, 1, T::one(), order),
        }
    }

    pub fn monomial(i: usize, j: usize, c: T, order: usize) -> Self {
        Self::from_terms(order, [(i, j, c)])
    }

    /// Sums the given terms; terms beyond `order` are dropped.
    pub fn from_terms(order: usize, terms: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut s = Self::zero(order);
        for (i, j, c) in terms {
            if i + j <= order {
                let idx = index(i, j);
                s.coeffs[idx] = s.coeffs[idx].plus(&c);
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.coeff_ref(i, j).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeff_ref(&self, i: usize, j: usize) -> Option<&T> {
        (i + j <= self.order).then(|| &self.coeffs[index(i, j)])
    }

    /// Overwrites one coefficient. Panics beyond the truncation order.
    pub fn set(&mut self, i: usize, j: usize, c: T) {
        assert!(i + j <= self.order, "monomial u^{i} v^{j} exceeds order {}", self.order);
        self.coeffs[index(i, j)] = c;
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        (0..=self.order)
            .flat_map(degree_monomials)
            .zip(self.coeffs.iter())
            .filter(|(_, c)| !c.is_zero())
            .map(|((i, j), c)| (i, j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest total degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.terms().next().map(|(i, j, _)| i + j)
    }

    /// Highest total degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.terms().last().map(|(i, j, _)| i + j)
    }

    /// Changes the order, dropping or zero-padding high degrees.
    pub fn with_order(&self, order: usize) -> Self {
        let mut s = Self::zero(order);
        let n = table_len(order.min(self.order));
        s.coeffs[..n].clone_from_slice(&self.coeffs[..n]);
        s
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.with_order(order.min(self.order))
    }

    pub fn add(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let coeffs = (0..table_len(order)).map(|k| self.coeffs[k].plus(&o.coeffs[k])).collect();
        Series2 { order, coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let coeffs = (0..table_len(order)).map(|k| self.coeffs[k].minus(&o.coeffs[k])).collect();
        Series2 { order, coeffs }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.negate())
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero(self.order);
        }
        self.map(|c| if c.is_zero() { T::zero() } else { c.times(s) })
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.map(|c| c.times_rat(r))
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, o: &Self) -> Self {
        self.mul_to(o, self.order.min(o.order))
    }

    /// Cauchy product truncated to an explicit order.
    ///
    /// The caller is responsible for the result being meaningful up to `order`,
    /// e.g. when one factor has positive valuation.
    pub fn mul_to(&self, o: &Self, order: usize) -> Self {
        let mut out = Self::zero(order);
        let rhs: Vec<(usize, usize, &T)> = o.terms().collect();
        for (i, j, a) in self.terms() {
            let da = i + j;
            if da > order {
                break;
            }
            for &(k, l, b) in &rhs {
                if da + k + l > order {
                    break;
                }
                let idx = index(i + k, j + l);
                out.coeffs[idx] = out.coeffs[idx].plus(&a.times(b));
            }
        }
        out
    }

    /// Powers `1, s, s², …, s^n` truncated to `order`.
    fn powers(&self, n: usize, order: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(Self::constant(T::one(), order));
        let base = self.with_order(order);
        for p in 1..=n {
            let next = if base.is_zero() { Self::zero(order) } else { out[p - 1].mul_to(&base, order) };
            out.push(next);
        }
        out
    }

    /// `f(g1, g2)`, truncated to the smallest of the three orders.
    pub fn compose_pair(&self, g1: &Self, g2: &Self) -> Result<Self, SeriesError> {
        if !g1.coeffs[0].is_zero() || !g2.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let order = self.order.min(g1.order).min(g2.order);
        Ok(self.compose_unchecked(g1, g2, order))
    }

    /// Substitution with an explicit result order; `g1`, `g2` must vanish at 0.
    pub(crate) fn compose_unchecked(&self, g1: &Self, g2: &Self, order: usize) -> Self {
        let top = match self.truncate(order).degree() {
            Some(d) => d,
            None => return Self::zero(order),
        };
        let p1 = g1.powers(top, order);
        let p2 = g2.powers(top, order);
        let mut out = Self::zero(order);
        for j in 0..=top {
            // inner = Σ_i f_ij g1^i
            let mut inner: Option<Self> = None;
            for i in 0..=(top - j) {
                let c = &self.coeffs[index(i, j)];
                if c.is_zero() || p1[i].is_zero() {
                    continue;
                }
                let term = p1[i].scale(c);
                inner = Some(match inner {
                    Some(acc) => acc.add(&term),
                    None => term,
                });
            }
            if let Some(inner) = inner {
                let contrib = if j == 0 { inner } else { inner.mul_to(&p2[j], order) };
                out = out.add(&contrib);
            }
        }
        out
    }

    /// `f ∘ M`, i.e. `f(a u + b v, c u + d v)`.
    pub fn linear_subst(&self, m: &LinearMap2<T>) -> Self {
        let (g1, g2) = m.as_series(self.order);
        self.compose_unchecked(&g1, &g2, self.order)
    }

    /// Formal partial derivative; the order drops by one.
    pub fn partial(&self, axis: Axis) -> Self {
        let order = self.order.saturating_sub(1);
        let mut out = Self::zero(order);
        for (i, j, c) in self.terms() {
            match axis {
                Axis::First if i > 0 && i + j - 1 <= order => {
                    out.coeffs[index(i - 1, j)] = c.times(&T::from_i64(i as i64));
                }
                Axis::Second if j > 0 && i + j - 1 <= order => {
                    out.coeffs[index(i, j - 1)] = c.times(&T::from_i64(j as i64));
                }
                _ => {}
            }
        }
        out
    }

    pub fn homogeneous_part(&self, k: usize) -> Result<Self, SeriesError> {
        if k > self.order {
            return Err(SeriesError::DegreeOutOfRange { degree: k, order: self.order });
        }
        let mut out = Self::zero(self.order);
        for (i, j) in degree_monomials(k) {
            out.coeffs[index(i, j)] = self.coeffs[index(i, j)].clone();
        }
        Ok(out)
    }

    /// `f(v, u)`.
    pub fn swap_vars(&self) -> Self {
        let mut out = Self::zero(self.order);
        for k in 0..=self.order {
            for (i, j) in degree_monomials(k) {
                out.coeffs[index(j, i)] = self.coeffs[index(i, j)].clone();
            }
        }
        out
    }

    /// Evaluates the truncation at a real point; `None` if a coefficient is not real.
    pub fn eval(&self, x: f64, y: f64) -> Option<f64> {
        let mut acc = 0.0;
        for (i, j, c) in self.terms() {
            acc += c.to_f64()? * x.powi(i as i32) * y.powi(j as i32);
        }
        Some(acc)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Series2<U> {
        Series2 { order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Float copy; `None` if a coefficient is not real.
    pub fn to_f64(&self) -> Option<Series2<f64>> {
        let coeffs = self.coeffs.iter().map(|c| c.to_f64()).collect::<Option<Vec<_>>>()?;
        Some(Series2 { order: self.order, coeffs })
    }

    /// Serialized table `[[i, j, "coef"], …]` of nonzero terms in graded-lex order.
    pub fn to_table(&self) -> Vec<(usize, usize, String)> {
        self.terms().map(|(i, j, c)| (i, j, c.to_text())).collect()
    }
}

impl Series2<f64> {
    /// Horner evaluation for the float ring.
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        // Σ_k Σ_j c x^{k-j} y^j, evaluated as a polynomial in y per power of x
        let n = self.order;
        let mut acc = 0.0;
        for i in (0..=n).rev() {
            let mut inner = 0.0;
            for j in (0..=(n - i)).rev() {
                inner = inner * y + self.coeffs[index(i, j)];
            }
            acc = acc * x + inner;
        }
        acc
    }
}

impl<T: Scalar> Add for &Series2<T> {
    type Output = Series2<T>;
    fn add(self, o: Self) -> Series2<T> {
        Series2::add(self, o)
    }
}

impl<T: Scalar> Sub for &Series2<T> {
    type Output = Series2<T>;
    fn sub(self, o: Self) -> Series2<T> {
        Series2::sub(self, o)
    }
}

impl<T: Scalar> Mul for &Series2<T> {
    type Output = Series2<T>;
    fn mul(self, o: Self) -> Series2<T> {
        Series2::mul(self, o)
    }
}

impl<T: Scalar> Neg for &Series2<T> {
    type Output = Series2<T>;
    fn neg(self) -> Series2<T> {
        Series2::neg(self)
    }
}

/// Truncated power series in one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Series1<T> {
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> Series1<T> {
    pub fn zero(order: usize) -> Self {
        Series1 { order, coeffs: vec![T::zero(); order + 1] }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant slot");
        Series1 { order: coeffs.len() - 1, coeffs }
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, m: usize) -> T {
        self.coeffs.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn set(&mut self, m: usize, c: T) {
        assert!(m <= self.order, "exponent {m} exceeds order {}", self.order);
        self.coeffs[m] = c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &T)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        Series1 { order, coeffs: (0..=order).map(|m| self.coeffs[m].plus(&o.coeffs[m])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        Series1 { order, coeffs: (0..=order).map(|m| self.coeffs[m].minus(&o.coeffs[m])).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|c| c.times(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out = Self::zero(order);
        for (a, x) in self.terms() {
            for (b, y) in o.terms() {
                if a + b > order {
                    break;
                }
                out.coeffs[a + b] = out.coeffs[a + b].plus(&x.times(y));
            }
        }
        out
    }

    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integrate(&self) -> Self {
        let mut out = Self::zero(self.order + 1);
        for (m, c) in self.terms() {
            out.coeffs[m + 1] = c.div_rat(&Rat::from_integer(((m + 1) as i64).into()));
        }
        out
    }

    /// Formal derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut out = Self::zero(order);
        for (m, c) in self.terms() {
            if m >= 1 && m - 1 <= order {
                out.coeffs[m - 1] = c.times(&T::from_i64(m as i64));
            }
        }
        out
    }

    /// `f(c t)`.
    pub fn rescale_arg(&self, c: &Rat) -> Self {
        let mut pow = Rat::from_integer(1.into());
        let mut out = Self::zero(self.order);
        for m in 0..=self.order {
            out.coeffs[m] = self.coeffs[m].times_rat(&pow);
            pow *= c;
        }
        out
    }

    /// `f(t(u, v))` as a two-variable series of the given order.
    pub fn compose_into(&self, t: &Series2<T>, order: usize) -> Result<Series2<T>, SeriesError> {
        if !t.coeff(0, 0).is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let t = t.with_order(order);
        let mut acc = Series2::zero(order);
        // Horner from the top coefficient
        for m in (0..=self.order).rev() {
            acc = acc.mul_to(&t, order).add(&Series2::constant(self.coeffs[m].clone(), order));
        }
        Ok(acc)
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c.to_f64()?;
        }
        Some(acc)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Series1<U> {
        Series1 { order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Serialized table `[[m, "coef"], …]` of nonzero terms.
    pub fn to_table(&self) -> Vec<(usize, String)> {
        self.terms().map(|(m, c)| (m, c.to_text())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    type S = Series2<Rat>;

    fn u(n: usize) -> S {
        S::var(Axis::First, n)
    }
    fn v(n: usize) -> S {
        S::var(Axis::Second, n)
    }
    fn q(n: i64) -> Rat {
        rat_int(n)
    }

    #[test]
    fn add_examples() {
        let s = &u(3) + &v(3);
        assert_eq!(s.to_table(), vec![(1, 0, "1/1".into()), (0, 1, "1/1".into())]);
        assert_eq!(&s + &S::zero(3), s);
        let u2 = &u(3) * &u(3);
        assert!((&u2 + &u2.neg()).is_zero());
        assert_eq!(s.add(&S::zero(2)).order(), 2);
    }

    #[test]
    fn mul_examples() {
        let p = &(&u(2) + &v(2)) * &(&u(2) - &v(2));
        assert_eq!(p, S::from_terms(2, [(2, 0, q(1)), (0, 2, q(-1))]));
        assert!((&u(1) * &v(1)).is_zero());
        let one_u = &S::constant(q(1), 2) + &u(2);
        assert_eq!(&one_u * &one_u, S::from_terms(2, [(0, 0, q(1)), (1, 0, q(2)), (2, 0, q(1))]));
    }

    #[test]
    fn compose_examples() {
        let n = 3;
        let f = S::monomial(2, 0, q(1), n);
        let g1 = &u(n) + &v(n);
        assert_eq!(f.compose_pair(&g1, &v(n)).unwrap(), S::from_terms(n, [(2, 0, q(1)), (1, 1, q(2)), (0, 2, q(1))]));
        let f = S::from_terms(n, [(1, 1, q(1)), (3, 0, rat(2, 3)), (0, 0, q(5))]);
        assert_eq!(f.compose_pair(&u(n), &v(n)).unwrap(), f);
        // uv ∘ (u + u², v) = uv + u²v
        let f = S::monomial(1, 1, q(1), n);
        let g1 = &u(n) + &S::monomial(2, 0, q(1), n);
        assert_eq!(f.compose_pair(&g1, &v(n)).unwrap(), S::from_terms(n, [(1, 1, q(1)), (2, 1, q(1))]));
        let bad = &S::constant(q(1), n) + &u(n);
        assert_eq!(f.compose_pair(&bad, &v(n)), Err(SeriesError::NonzeroConstantTerm));
    }

    #[test]
    fn linear_subst_examples() {
        let f = S::monomial(1, 1, q(1), 2);
        let c = LinearMap2::from_i64(1, 1, -1, 1);
        assert_eq!(f.linear_subst(&c), S::from_terms(2, [(2, 0, q(-1)), (0, 2, q(1))]));
        let g = S::from_terms(4, [(3, 1, q(2)), (0, 2, rat(1, 7))]);
        assert_eq!(g.linear_subst(&LinearMap2::identity()), g);
        assert_eq!(u(2).linear_subst(&LinearMap2::reflection()), u(2));
    }

    #[test]
    fn partial_examples() {
        let r = S::from_terms(2, [(2, 0, q(1)), (0, 2, q(1))]);
        assert_eq!(r.partial(Axis::First), S::monomial(1, 0, q(2), 1));
        let h = S::from_terms(2, [(2, 0, q(1)), (0, 2, q(-1))]);
        assert_eq!(h.partial(Axis::Second), S::monomial(0, 1, q(-2), 1));
        assert!(S::constant(q(4), 3).partial(Axis::Second).is_zero());
    }

    #[test]
    fn homogeneous_and_swap() {
        let f = S::from_terms(3, [(0, 0, q(1)), (1, 0, q(1)), (1, 1, q(1))]);
        assert_eq!(f.homogeneous_part(2).unwrap(), S::monomial(1, 1, q(1), 3));
        assert!(u(3).homogeneous_part(0).unwrap().is_zero());
        let g = S::from_terms(3, [(3, 0, q(1)), (2, 1, q(1))]);
        assert_eq!(g.homogeneous_part(3).unwrap(), g);
        assert_eq!(f.homogeneous_part(4), Err(SeriesError::DegreeOutOfRange { degree: 4, order: 3 }));

        assert_eq!(S::monomial(2, 1, q(1), 3).swap_vars(), S::monomial(1, 2, q(1), 3));
        assert_eq!(S::monomial(1, 1, q(1), 3).swap_vars(), S::monomial(1, 1, q(1), 3));
        let lin = S::from_terms(1, [(1, 0, q(1)), (0, 1, q(2))]);
        assert_eq!(lin.swap_vars(), S::from_terms(1, [(0, 1, q(1)), (1, 0, q(2))]));
    }

    #[test]
    fn eval_examples() {
        let f = S::from_terms(2, [(2, 0, q(1)), (0, 1, q(1))]);
        assert_eq!(f.eval(1.0, 2.0), Some(3.0));
        assert_eq!(S::from_terms(2, [(0, 0, rat(3, 4)), (1, 1, q(9))]).eval(0.0, 0.0), Some(0.75));
        let uv = S::monomial(1, 1, q(1), 2);
        assert!((uv.eval(3.0, 1.0 / 3.0).unwrap() - 1.0).abs() < 1e-15);
        let ff = f.to_f64().unwrap();
        assert_eq!(ff.value_at(1.0, 2.0), 3.0);
    }

    #[test]
    fn series1_examples() {
        let one = Series1::from_coeffs(vec![q(1)]);
        assert_eq!(one.integrate(), Series1::from_coeffs(vec![q(0), q(1)]));
        let t = Series1::from_coeffs(vec![q(0), q(1)]);
        assert_eq!(t.integrate(), Series1::from_coeffs(vec![q(0), q(0), rat(1, 2)]));
        let g = Series1::from_coeffs(vec![q(1), q(1)]);
        assert_eq!(g.integrate(), Series1::from_coeffs(vec![q(0), q(1), rat(1, 2)]));
        assert_eq!(g.integrate().derivative(), g);
        assert_eq!(g.rescale_arg(&rat(1, 4)), Series1::from_coeffs(vec![q(1), rat(1, 4)]));
    }

    #[test]
    fn compose_into_substitutes_quadratic() {
        // F(t) = t/2 + t²/4 at t = u² - v²
        let f = Series1::from_coeffs(vec![q(0), rat(1, 2), rat(1, 4)]);
        let t = S::from_terms(4, [(2, 0, q(1)), (0, 2, q(-1))]);
        let h = f.compose_into(&t, 4).unwrap();
        let expect = S::from_terms(
            4,
            [(2, 0, rat(1, 2)), (0, 2, rat(-1, 2)), (4, 0, rat(1, 4)), (2, 2, rat(-1, 2)), (0, 4, rat(1, 4))],
        );
        assert_eq!(h, expect);
    }
}
