//! Exact arbitrary-precision rationals.
//!
//! Values whose numerator and denominator fit in an `i64` are stored inline
//! and combined in `i128`; anything larger falls back to
//! [`num_rational::BigRational`]. Both forms are kept in lowest terms with a
//! positive denominator, and a value is big only when it cannot be small, so
//! equality and hashing are structural. The text form is `p` for integers and
//! `p/q` otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Rational(Repr);

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => b.hash(state),
        }
    }
}

/// Reduces `n / d` (with `d != 0`) and stores it in the narrowest form.
fn reduced(mut n: i128, mut d: i128) -> Rational {
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = n.gcd(&d);
    if g > 1 {
        n /= g;
        d /= g;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
        _ => Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
    }
}

fn from_big(b: BigRational) -> Rational {
    match (b.numer().to_i64(), b.denom().to_i64()) {
        (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
        _ => Rational(Repr::Big(b)),
    }
}

fn add(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (&Repr::Small(n1, 1), &Repr::Small(n2, 1)) => match n1.checked_add(n2) {
            Some(n) => Rational(Repr::Small(n, 1)),
            None => reduced(i128::from(n1) + i128::from(n2), 1),
        },
        (&Repr::Small(n1, d1), &Repr::Small(n2, d2)) => {
            let (n1, d1, n2, d2) = (i128::from(n1), i128::from(d1), i128::from(n2), i128::from(d2));
            if d1 == d2 {
                reduced(n1 + n2, d1)
            } else {
                reduced(n1 * d2 + n2 * d1, d1 * d2)
            }
        }
        _ => from_big(a.to_big() + b.to_big()),
    }
}

fn mul(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (&Repr::Small(n1, d1), &Repr::Small(n2, d2)) => {
            if n1 == 0 || n2 == 0 {
                return Rational::zero();
            }
            reduced(i128::from(n1) * i128::from(n2), i128::from(d1) * i128::from(d2))
        }
        _ => from_big(a.to_big() * b.to_big()),
    }
}

fn div(a: &Rational, b: &Rational) -> Rational {
    assert!(!b.is_zero(), "division by zero");
    match (&a.0, &b.0) {
        (&Repr::Small(n1, d1), &Repr::Small(n2, d2)) => {
            reduced(i128::from(n1) * i128::from(d2), i128::from(d1) * i128::from(n2))
        }
        _ => from_big(a.to_big() / b.to_big()),
    }
}

fn neg(a: &Rational) -> Rational {
    match a.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(n) => Rational(Repr::Small(n, d)),
            None => reduced(-i128::from(n), i128::from(d)),
        },
        Repr::Big(ref b) => from_big(-b),
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        reduced(i128::from(num), i128::from(den))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        from_big(BigRational::new(num, den))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            neg(self)
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        Rational::one() / self
    }

    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Rational::from_int(n.div_euclid(*d)),
            Repr::Big(b) => from_big(b.floor()),
        }
    }

    /// The value as an `i64` when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    /// The value as a `usize` when it is a nonnegative integer that fits.
    pub fn to_usize(&self) -> Option<usize> {
        self.to_i64().and_then(|n| usize::try_from(n).ok())
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Parses `p`, `-p`, or `p/q`. With `strict`, a fraction that is not in
    /// lowest terms (or has a negative denominator) is rejected instead of
    /// being canonicalized.
    pub fn parse(text: &str, strict: bool) -> Result<Self, ParseRationalError> {
        let text = text.trim();
        let err = || ParseRationalError(text.to_string());
        match text.split_once('/') {
            None => {
                let n = BigInt::from_str(text).map_err(|_| err())?;
                Ok(Rational::from(n))
            }
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
                let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
                if q.is_zero() {
                    return Err(err());
                }
                if strict && (q.is_negative() || !p.gcd(&q).is_one() || q.is_one()) {
                    return Err(err());
                }
                Ok(from_big(BigRational::new(p, q)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{0}`")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse(s, false)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (&Repr::Small(n1, d1), &Repr::Small(n2, d2)) => {
                if d1 == d2 {
                    n1.cmp(&n2)
                } else {
                    (i128::from(n1) * i128::from(d2)).cmp(&(i128::from(n2) * i128::from(d1)))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        reduced(n as i128, 1)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        from_big(BigRational::from_integer(n))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $f:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                $f(&self, rhs)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(self, &rhs)
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $assign_trait for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                *self = $f(self, &rhs);
            }
        }
        impl<'a> $assign_trait<&'a Rational> for Rational {
            fn $assign_method(&mut self, rhs: &'a Rational) {
                *self = $f(self, rhs);
            }
        }
    };
}

fn sub(a: &Rational, b: &Rational) -> Rational {
    add(a, &neg(b))
}

binop!(Add, add, AddAssign, add_assign, add);
binop!(Sub, sub, SubAssign, sub_assign, sub);
binop!(Mul, mul, MulAssign, mul_assign, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        div(&self, &rhs)
    }
}

impl<'a> Div<&'a Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        div(&self, rhs)
    }
}

impl<'b> Div<&'b Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &'b Rational) -> Rational {
        div(self, rhs)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg(self)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        *self == Rational::from_int(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Rational::from_int(*other)))
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Rational::parse(&text, false).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let r = Rational::new(3, 6);
        assert_eq!(r.to_string(), "1/2");
        assert_eq!(Rational::new(4, -2).to_string(), "-2");
        assert_eq!(Rational::new(-3, -9), Rational::new(1, 3));
    }

    #[test]
    fn strict_parse_rejects_unreduced() {
        assert!(Rational::parse("3/6", true).is_err());
        assert_eq!(Rational::parse("3/6", false).unwrap(), Rational::new(1, 2));
        assert_eq!(Rational::parse("7", true).unwrap(), Rational::from_int(7));
        assert!(Rational::parse("4/1", true).is_err());
        assert!(Rational::parse("1/0", false).is_err());
        assert!(Rational::parse("x", false).is_err());
    }

    #[test]
    fn arithmetic_is_exact() {
        let third = Rational::new(1, 3);
        let sum: Rational = std::iter::repeat_n(third.clone(), 3).sum();
        assert_eq!(sum, Rational::one());
        assert_eq!(&third * &Rational::from_int(3), Rational::one());
        assert_eq!(Rational::one() / third, Rational::from_int(3));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rational::from_int(i64::MAX) + Rational::one();
        assert_eq!(big.to_string(), "9223372036854775808");
        assert!(big > Rational::from_int(i64::MAX));
        let back = &big - &Rational::one();
        assert_eq!(back.to_i64(), Some(i64::MAX));
        assert_eq!(back, Rational::from_int(i64::MAX));
        assert_eq!(-Rational::from_int(i64::MIN), big);
        let tiny = Rational::new(1, i64::MAX) * Rational::new(1, 2);
        assert_eq!(tiny.recip(), Rational::from_int(i64::MAX) * Rational::from_int(2));
        assert_eq!(Rational::new(-7, 2).floor(), Rational::from_int(-4));
        assert_eq!("18446744073709551616/2".parse::<Rational>().unwrap(), big);
    }
}
