//! Dual-mode scalars and finite q-Pochhammer products.
//!
//! Every kernel in this crate is written once, generically over [`Field`], and
//! instantiated for exact big rationals and for `f64`. The dynamic [`Scalar`]
//! type is what crosses the public API; it refuses to mix the two modes.
//!
//! Infinite products `(z; b)_∞` never appear on their own. They always occur in
//! ratios `(z; b)_∞ / (z·b^s; b)_∞`, which [`pochhammer_inf_ratio`] reduces to a
//! finite product of `|s|` factors.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Arithmetic needed by the kernels, implemented for [`Rational`] and `f64`.
pub trait Field:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Integer power; `x^0 = 1` for every `x`, including zero.
    fn powi(&self, e: i64) -> Self {
        let mut p = Self::one();
        let mut base = self.clone();
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                p = p * &base;
            }
            base = base.clone() * &base;
            n >>= 1;
        }
        if e < 0 {
            Self::one() / p
        } else {
            p
        }
    }

    fn one_minus(&self) -> Self {
        Self::one() - self.clone()
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.clone() / rhs.clone())
        }
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powi(&self, e: i64) -> Self {
        if e == 0 {
            1.0
        } else if let Ok(e) = i32::try_from(e) {
            f64::powi(*self, e)
        } else {
            f64::powf(*self, e as f64)
        }
    }
}

/// `(z; base)_k = ∏_{i<k} (1 − z·base^i)`.
pub fn pochhammer_in<F: Field>(z: &F, base: &F, k: u64) -> F {
    let mut acc = F::one();
    let mut term = z.clone();
    for _ in 0..k {
        acc = acc * &term.one_minus();
        term = term * base;
    }
    acc
}

/// `(z; base)_∞ / (z·base^shift; base)_∞` as a finite product.
pub fn pochhammer_inf_ratio_in<F: Field>(z: &F, base: &F, shift: i64) -> Result<F> {
    if *base == F::one() {
        return Err(Error::Domain("infinite Pochhammer ratio with base 1".into()));
    }
    if shift >= 0 {
        return Ok(pochhammer_in(z, base, shift as u64));
    }
    let mut denom = F::one();
    for i in shift..0 {
        denom = denom * &(z.clone() * &base.powi(i)).one_minus();
    }
    F::one().checked_div(&denom)
}

/// A number that is either an exact rational or a double.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Scalar {
    pub fn ratio(num: i64, den: i64) -> Scalar {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Exact(Rational::from_int(n))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => Field::to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    /// Same value in float mode.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => Zero::is_zero(r),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => One::is_one(r),
            Scalar::Float(x) => *x == 1.0,
        }
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a + b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn try_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a - b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a - b)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a * b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.checked_div(b).map(Scalar::Exact),
            (Scalar::Float(a), Scalar::Float(b)) => a.checked_div(b).map(Scalar::Float),
            _ => Err(Error::ModeMismatch),
        }
    }

    /// Exact mode compares structurally; float mode compares within `tol`
    /// (absolute, relative to `max(1, |self|)`).
    pub fn approx_eq(&self, rhs: &Scalar, tol: f64) -> Result<bool> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(a == b),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(f64::abs(a - b) <= tol * f64::abs(*a).max(1.0)),
            _ => Err(Error::ModeMismatch),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", r),
            Scalar::Float(x) => write!(f, "{}", x),
        }
    }
}

/// Parses `"a/b"` or `"a"` (decimal integers, optional leading minus) as an
/// exact rational, and anything else `f64` accepts as a float.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scalar> {
        let s = s.trim();
        let is_int = |p: &str| {
            let digits = p.strip_prefix('-').unwrap_or(p);
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        };
        let parse_int = |p: &str| p.parse::<BigInt>().map_err(|_| Error::Parse(s.to_string()));
        if let Some((num, den)) = s.split_once('/') {
            if !is_int(num) || !is_int(den) {
                return Err(Error::Parse(s.to_string()));
            }
            let den = parse_int(den)?;
            if Zero::is_zero(&den) {
                return Err(Error::DivisionByZero);
            }
            return Ok(Scalar::Exact(BigRational::new(parse_int(num)?, den)));
        }
        if is_int(s) {
            return Ok(Scalar::Exact(BigRational::from_integer(parse_int(s)?)));
        }
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Scalar::Float(x)),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&r.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Scalar, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Number(x) => Ok(Scalar::Float(x)),
        }
    }
}

/// Borrowed view of a parameter pair in a single mode.
pub enum QTPair<'a> {
    Exact(&'a Rational, &'a Rational),
    Float(f64, f64),
}

/// Macdonald parameters `(q, t)`, both in the same mode, with `0 ≤ q < 1`
/// and `0 < t < 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QTRepr", into = "QTRepr")]
pub struct QTParams {
    q: Scalar,
    t: Scalar,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QTRepr {
    q: Scalar,
    t: Scalar,
}

impl TryFrom<QTRepr> for QTParams {
    type Error = Error;
    fn try_from(r: QTRepr) -> Result<QTParams> {
        QTParams::new(r.q, r.t)
    }
}

impl From<QTParams> for QTRepr {
    fn from(p: QTParams) -> QTRepr {
        QTRepr { q: p.q, t: p.t }
    }
}

impl QTParams {
    pub fn new(q: Scalar, t: Scalar) -> Result<QTParams> {
        if q.mode() != t.mode() {
            return Err(Error::ModeMismatch);
        }
        let (qf, tf) = (q.to_f64(), t.to_f64());
        let q_ok = match &q {
            Scalar::Exact(r) => !r.is_negative() && *r < <Rational as One>::one(),
            Scalar::Float(_) => (0.0..1.0).contains(&qf),
        };
        let t_ok = match &t {
            Scalar::Exact(r) => r.is_positive() && *r < <Rational as One>::one(),
            Scalar::Float(_) => tf > 0.0 && tf < 1.0,
        };
        if !q_ok {
            return Err(Error::OutOfRange(format!("q = {} must lie in [0, 1)", q)));
        }
        if !t_ok {
            return Err(Error::OutOfRange(format!("t = {} must lie in (0, 1)", t)));
        }
        Ok(QTParams { q, t })
    }

    pub fn exact(q: (i64, i64), t: (i64, i64)) -> Result<QTParams> {
        QTParams::new(Scalar::ratio(q.0, q.1), Scalar::ratio(t.0, t.1))
    }

    pub fn float(q: f64, t: f64) -> Result<QTParams> {
        QTParams::new(Scalar::Float(q), Scalar::Float(t))
    }

    /// Schur point `t = q`.
    pub fn schur(q: Scalar) -> Result<QTParams> {
        QTParams::new(q.clone(), q)
    }

    /// Hall–Littlewood point `q = 0`.
    pub fn hall_littlewood(t: Scalar) -> Result<QTParams> {
        let zero = match t.mode() {
            Mode::Exact => Scalar::int(0),
            Mode::Float => Scalar::Float(0.0),
        };
        QTParams::new(zero, t)
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn t(&self) -> &Scalar {
        &self.t
    }

    pub fn mode(&self) -> Mode {
        self.q.mode()
    }

    pub fn pair(&self) -> QTPair<'_> {
        match (&self.q, &self.t) {
            (Scalar::Exact(q), Scalar::Exact(t)) => QTPair::Exact(q, t),
            (Scalar::Float(q), Scalar::Float(t)) => QTPair::Float(*q, *t),
            _ => unreachable!("QTParams::new rejects mixed modes"),
        }
    }

    /// The same parameters in float mode.
    pub fn to_float(&self) -> QTParams {
        QTParams {
            q: self.q.to_float(),
            t: self.t.to_float(),
        }
    }

    pub fn as_f64(&self) -> (f64, f64) {
        (self.q.to_f64(), self.t.to_f64())
    }
}

/// Evaluates a generic expression in whichever mode `params` carries and
/// wraps the result back into a [`Scalar`].
#[macro_export]
macro_rules! with_qt {
    ($params:expr, |$q:ident, $t:ident| $body:expr) => {
        match $params.pair() {
            $crate::algebra::QTPair::Exact($q, $t) => $crate::algebra::Scalar::Exact($body),
            $crate::algebra::QTPair::Float(ref $q, ref $t) => $crate::algebra::Scalar::Float($body),
        }
    };
}

/// Like [`with_qt!`] for bodies returning `Result<F>`.
#[macro_export]
macro_rules! try_with_qt {
    ($params:expr, |$q:ident, $t:ident| $body:expr) => {
        match $params.pair() {
            $crate::algebra::QTPair::Exact($q, $t) => $body.map($crate::algebra::Scalar::Exact),
            $crate::algebra::QTPair::Float(ref $q, ref $t) => $body.map($crate::algebra::Scalar::Float),
        }
    };
}

fn same_mode<'a>(a: &'a Scalar, b: &'a Scalar) -> Result<QTPair<'a>> {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Ok(QTPair::Exact(x, y)),
        (Scalar::Float(x), Scalar::Float(y)) => Ok(QTPair::Float(*x, *y)),
        _ => Err(Error::ModeMismatch),
    }
}

/// `(z; base)_k`.
pub fn pochhammer(z: &Scalar, base: &Scalar, k: u64) -> Result<Scalar> {
    Ok(match same_mode(z, base)? {
        QTPair::Exact(z, b) => Scalar::Exact(pochhammer_in(z, b, k)),
        QTPair::Float(z, b) => Scalar::Float(pochhammer_in(&z, &b, k)),
    })
}

/// `(z; base)_∞ / (z·base^shift; base)_∞`.
pub fn pochhammer_inf_ratio(z: &Scalar, base: &Scalar, shift: i64) -> Result<Scalar> {
    match same_mode(z, base)? {
        QTPair::Exact(z, b) => pochhammer_inf_ratio_in(z, b, shift).map(Scalar::Exact),
        QTPair::Float(z, b) => pochhammer_inf_ratio_in(&z, &b, shift).map(Scalar::Float),
    }
}
