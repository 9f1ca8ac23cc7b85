//! Coefficient rings.
//!
//! Three rings back every series in the crate:
//!
//! * [`Rat`]: exact rationals, always in lowest terms with a positive denominator;
//! * [`Alg`]: exact elements of `Q(i, √d)` for one positive non-square rational
//!   `d`, written `a + b√d + i(c + e√d)`. With `b = e = 0` this is the
//!   complexified rational ring `a + ci`;
//! * `f64`: floating point, used only for numerical verification.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

pub type Rat = num_rational::BigRational;

/// Arithmetic needed by the series engine.
///
/// The method names avoid clashing with `std::ops` so that both can be in scope.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn from_rat(r: &Rat) -> Self;
    /// Division by a nonzero rational. Panics on zero.
    fn div_rat(&self, r: &Rat) -> Self;
    /// Real value as a float, `None` when the value has an imaginary part.
    fn to_f64(&self) -> Option<f64>;
    /// Canonical text form used in serialized coefficient tables.
    fn to_text(&self) -> String;

    fn from_i64(n: i64) -> Self {
        Self::from_rat(&Rat::from_integer(BigInt::from(n)))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn times_rat(&self, r: &Rat) -> Self {
        self.times(&Self::from_rat(r))
    }
}

/// A scalar ring in which every nonzero element is invertible.
pub trait FieldScalar: Scalar {
    fn inv(&self) -> Option<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|r| self.times(&r))
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Always `p/q`, also for integers.
pub fn rat_text(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or `p`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if num_traits::Zero::is_zero(&d) {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

/// Exact square root of a nonnegative rational, when it is rational.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or_else(|| {
        // ratio of huge integers: scale both down
        let n = ToPrimitive::to_f64(r.numer()).unwrap_or(f64::NAN);
        let d = ToPrimitive::to_f64(r.denom()).unwrap_or(f64::NAN);
        n / d
    })
}

impl Scalar for Rat {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn div_rat(&self, r: &Rat) -> Self {
        assert!(!num_traits::Zero::is_zero(r), "division by zero");
        self / r
    }
    fn to_f64(&self) -> Option<f64> {
        Some(rat_to_f64(self))
    }
    fn to_text(&self) -> String {
        rat_text(self)
    }
}

impl FieldScalar for Rat {
    fn inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }
    fn div_rat(&self, r: &Rat) -> Self {
        self / rat_to_f64(r)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }
    fn to_text(&self) -> String {
        format!("{self:e}")
    }
}

impl FieldScalar for f64 {
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
}

// Zero operands are the common case in sparse series; skip the gcd for them.
fn rat_add(x: &Rat, y: &Rat) -> Rat {
    if y.is_zero() {
        x.clone()
    } else if x.is_zero() {
        y.clone()
    } else {
        x + y
    }
}

fn rat_mul(x: &Rat, y: &Rat) -> Rat {
    if x.is_zero() || y.is_zero() {
        Rat::zero()
    } else {
        x * y
    }
}

fn rat_sub(x: &Rat, y: &Rat) -> Rat {
    if y.is_zero() {
        x.clone()
    } else if x.is_zero() {
        -y
    } else {
        x - y
    }
}

/// Element `a + b√d` of a real quadratic field, `d > 0` not a square.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Surd {
    a: Rat,
    b: Rat,
}

impl Surd {
    fn zero() -> Self {
        Surd { a: Rat::zero(), b: Rat::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Surd) -> Surd {
        Surd { a: rat_add(&self.a, &o.a), b: rat_add(&self.b, &o.b) }
    }
    fn sub(&self, o: &Surd) -> Surd {
        Surd { a: rat_sub(&self.a, &o.a), b: rat_sub(&self.b, &o.b) }
    }
    fn neg(&self) -> Surd {
        Surd { a: -&self.a, b: -&self.b }
    }
    fn mul(&self, o: &Surd, d: Option<&Rat>) -> Surd {
        if self.is_zero() || o.is_zero() {
            return Surd::zero();
        }
        if self.b.is_zero() && o.b.is_zero() {
            return Surd { a: &self.a * &o.a, b: Rat::zero() };
        }
        let d = d.expect("surd part without radicand");
        let mut a = if self.a.is_zero() || o.a.is_zero() { Rat::zero() } else { &self.a * &o.a };
        if !self.b.is_zero() && !o.b.is_zero() {
            a += &self.b * &o.b * d;
        }
        let b = rat_add(&rat_mul(&self.a, &o.b), &rat_mul(&self.b, &o.a));
        Surd { a, b }
    }
    fn scale(&self, r: &Rat) -> Surd {
        Surd { a: &self.a * r, b: &self.b * r }
    }
    fn conj(&self) -> Surd {
        Surd { a: self.a.clone(), b: -&self.b }
    }
    /// Rational norm `a² − b²d`.
    fn norm(&self, d: Option<&Rat>) -> Rat {
        if self.b.is_zero() {
            return &self.a * &self.a;
        }
        let d = d.expect("surd part without radicand");
        &self.a * &self.a - &self.b * &self.b * d
    }
    fn inv(&self, d: Option<&Rat>) -> Option<Surd> {
        let n = self.norm(d);
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&n.recip()))
    }
    fn sign(&self, d: Option<&Rat>) -> Ordering {
        let sa = self.a.cmp(&Rat::zero());
        let sb = self.b.cmp(&Rat::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let d = d.expect("surd part without radicand");
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * d;
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }
    fn to_f64(&self, d: Option<&Rat>) -> f64 {
        let mut v = rat_to_f64(&self.a);
        if !self.b.is_zero() {
            let d = d.expect("surd part without radicand");
            v += rat_to_f64(&self.b) * rat_to_f64(d).sqrt();
        }
        v
    }
    fn text(&self, d: Option<&Rat>) -> String {
        if self.b.is_zero() {
            return rat_text(&self.a);
        }
        let d = d.expect("surd part without radicand");
        let surd = format!("{}*sqrt({})", rat_text(&self.b.abs()), rat_text(d));
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            if self.b.is_negative() {
                format!("-{surd}")
            } else {
                surd
            }
        } else {
            format!("{}{sign}{surd}", rat_text(&self.a))
        }
    }
}

/// Exact element of `Q(i, √d)`.
///
/// The radicand travels with every element that has a nonzero `√d` part;
/// elements without one mix freely with any radicand. Mixing two different
/// radicands is a programming error and panics.
#[derive(Clone, Debug)]
pub struct Alg {
    re: Surd,
    im: Surd,
    radicand: Option<Arc<Rat>>,
}

impl Alg {
    pub fn from_parts(re: Rat, im: Rat) -> Alg {
        Alg { re: Surd { a: re, b: Rat::zero() }, im: Surd { a: im, b: Rat::zero() }, radicand: None }
    }

    pub fn i() -> Alg {
        Alg::from_parts(Rat::zero(), Rat::one())
    }

    /// `√r` for a positive rational `r`; stays in `Q` when `r` is a perfect square.
    pub fn sqrt_of(r: &Rat) -> Alg {
        assert!(r.is_positive(), "square root of a non-positive rational");
        match rat_sqrt(r) {
            Some(q) => Alg::from_parts(q, Rat::zero()),
            None => Alg {
                re: Surd { a: Rat::zero(), b: Rat::one() },
                im: Surd::zero(),
                radicand: Some(Arc::new(r.clone())),
            },
        }
    }

    pub fn radicand(&self) -> Option<&Rat> {
        self.radicand.as_deref()
    }

    fn joint(&self, other: &Alg) -> Option<Arc<Rat>> {
        match (&self.radicand, &other.radicand) {
            (Some(a), Some(b)) => {
                if !Arc::ptr_eq(a, b) && a != b {
                    panic!("mixing radicands {a} and {b}");
                }
                Some(a.clone())
            }
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True when the value lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.im.is_zero() && self.re.b.is_zero()
    }

    pub fn as_rat(&self) -> Option<Rat> {
        self.is_rational().then(|| self.re.a.clone())
    }

    pub fn real_part(&self) -> Alg {
        Alg { re: self.re.clone(), im: Surd::zero(), radicand: self.radicand.clone() }
    }

    pub fn imag_part(&self) -> Alg {
        Alg { re: self.im.clone(), im: Surd::zero(), radicand: self.radicand.clone() }
    }

    /// Sign of a real element; `None` for non-real values.
    pub fn real_sign(&self) -> Option<Ordering> {
        self.is_real().then(|| self.re.sign(self.radicand()))
    }

    /// Absolute value of a real element.
    pub fn abs_real(&self) -> Option<Alg> {
        match self.real_sign()? {
            Ordering::Less => Some(self.negate()),
            _ => Some(self.clone()),
        }
    }

    /// Exact order comparison of two real elements.
    pub fn cmp_real(&self, other: &Alg) -> Option<Ordering> {
        self.minus(other).real_sign()
    }

    /// Complex value as a float pair.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let d = self.radicand();
        (self.re.to_f64(d), self.im.to_f64(d))
    }
}

impl PartialEq for Alg {
    fn eq(&self, other: &Alg) -> bool {
        if self.re.a != other.re.a || self.im.a != other.im.a {
            return false;
        }
        if self.re.b != other.re.b || self.im.b != other.im.b {
            return false;
        }
        let has_surd = !self.re.b.is_zero() || !self.im.b.is_zero();
        !has_surd || self.radicand == other.radicand
    }
}

impl From<Rat> for Alg {
    fn from(r: Rat) -> Alg {
        Alg::from_parts(r, Rat::zero())
    }
}

impl Scalar for Alg {
    fn zero() -> Self {
        Alg::from_parts(Rat::zero(), Rat::zero())
    }
    fn one() -> Self {
        Alg::from_parts(Rat::one(), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        Alg { re: self.re.add(&o.re), im: self.im.add(&o.im), radicand: self.joint(o) }
    }
    fn minus(&self, o: &Self) -> Self {
        Alg { re: self.re.sub(&o.re), im: self.im.sub(&o.im), radicand: self.joint(o) }
    }
    fn times(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Alg::zero();
        }
        let radicand = self.joint(o);
        let d = radicand.as_deref();
        let (re, im) = if self.im.is_zero() && o.im.is_zero() {
            (self.re.mul(&o.re, d), Surd::zero())
        } else {
            (self.re.mul(&o.re, d).sub(&self.im.mul(&o.im, d)), self.re.mul(&o.im, d).add(&self.im.mul(&o.re, d)))
        };
        Alg { re, im, radicand }
    }
    fn negate(&self) -> Self {
        Alg { re: self.re.neg(), im: self.im.neg(), radicand: self.radicand.clone() }
    }
    fn from_rat(r: &Rat) -> Self {
        Alg::from(r.clone())
    }
    fn div_rat(&self, r: &Rat) -> Self {
        assert!(!r.is_zero(), "division by zero");
        let inv = r.recip();
        Alg { re: self.re.scale(&inv), im: self.im.scale(&inv), radicand: self.radicand.clone() }
    }
    fn times_rat(&self, r: &Rat) -> Self {
        Alg { re: self.re.scale(r), im: self.im.scale(r), radicand: self.radicand.clone() }
    }
    fn to_f64(&self) -> Option<f64> {
        self.is_real().then(|| self.re.to_f64(self.radicand()))
    }
    fn to_text(&self) -> String {
        let d = self.radicand();
        if self.im.is_zero() {
            return self.re.text(d);
        }
        // Gaussian rationals keep the compact "p/q+r/si" form.
        if self.re.b.is_zero() && self.im.b.is_zero() {
            let sign = if self.im.a.is_negative() { "-" } else { "+" };
            return format!("{}{sign}{}i", rat_text(&self.re.a), rat_text(&self.im.a.abs()));
        }
        format!("{}+({})i", self.re.text(d), self.im.text(d))
    }
}

impl FieldScalar for Alg {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.radicand.as_deref();
        // 1/(x + iy) = (x - iy)/(x² + y²) with x, y real
        let n = self.re.mul(&self.re, d).add(&self.im.mul(&self.im, d));
        let ninv = n.inv(d)?;
        Some(Alg { re: self.re.mul(&ninv, d), im: self.im.neg().mul(&ninv, d), radicand: self.radicand.clone() })
    }
}

impl fmt::Display for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
