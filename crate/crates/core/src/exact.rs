//! Exact scalar arithmetic over the rationals and real quadratic extensions.
//!
//! Every scalar is a value `a + b*sqrt(m)` with `a`, `b` rational and `m` a
//! square-free nonnegative integer (the radicand). Pure rationals are stored
//! with `b = 0`, `m = 0`. Two scalars can be combined when at least one of
//! them is rational or both share the same radicand; mixing distinct radicands
//! is an error rather than an automatic field extension.
//!
//! The canonical string form is `p/q` for rationals and `(p/q)+(r/s)*sqrt(m)`
//! otherwise, with no spaces and the sign carried by the numerator.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Errors raised by exact-field operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible radicands: sqrt({0}) and sqrt({1})")]
    IncompatibleRadicands(u64, u64),
    #[error("square root of negative value {0}")]
    NegativeSqrt(String),
    #[error("square root of irrational value {0}")]
    IrrationalSqrt(String),
    #[error("radicand out of supported range")]
    RadicandTooLarge,
    #[error("cannot parse exact scalar from {0:?}")]
    Parse(String),
}

/// The four field operations, used by [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element of Q or Q(sqrt(m)): the value `a + b*sqrt(m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: Rational,
    b: Rational,
    m: u64,
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

impl ExactScalar {
    fn normalized(a: Rational, b: Rational, m: u64) -> Self {
        if b.is_zero() || m == 0 {
            return ExactScalar {
                a,
                b: Rational::zero(),
                m: 0,
            };
        }
        if m == 1 {
            return ExactScalar {
                a: a + b,
                b: Rational::zero(),
                m: 0,
            };
        }
        ExactScalar { a, b, m }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(big(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn from_rational(a: Rational) -> Self {
        ExactScalar {
            a,
            b: Rational::zero(),
            m: 0,
        }
    }

    /// The rational `p/q`. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(Rational::new(big(p), big(q)))
    }

    /// The value `a + b*sqrt(m)`. `m` must be square-free or a perfect
    /// square times a square-free part; it is canonicalized here.
    pub fn with_sqrt(a: Rational, b: Rational, m: u64) -> Result<Self, ExactError> {
        let (s, sf) = square_free_decomposition(&BigUint::from(m))?;
        let s = Rational::from_integer(BigInt::from(s));
        Ok(Self::normalized(a, b * s, sf))
    }

    /// Rational part `a` of `a + b*sqrt(m)`.
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    /// Coefficient `b` of `sqrt(m)`.
    pub fn sqrt_coefficient(&self) -> &Rational {
        &self.b
    }

    /// The radicand `m` (zero for rationals).
    pub fn radicand(&self) -> u64 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    /// The value as an integer, when it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.is_integer() {
            Some(self.a.to_integer())
        } else {
            None
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    /// Radicand shared by `x` and `y`, or an error if both are irrational
    /// with different radicands.
    fn unified_radicand(x: &Self, y: &Self) -> Result<u64, ExactError> {
        match (x.m, y.m) {
            (0, m) | (m, 0) => Ok(m),
            (m1, m2) if m1 == m2 => Ok(m1),
            (m1, m2) => Err(ExactError::IncompatibleRadicands(m1, m2)),
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ExactError> {
        let m = Self::unified_radicand(self, rhs)?;
        Ok(Self::normalized(
            &self.a + &rhs.a,
            &self.b + &rhs.b,
            m,
        ))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        let m = Self::unified_radicand(self, rhs)?;
        Ok(Self::normalized(
            &self.a - &rhs.a,
            &self.b - &rhs.b,
            m,
        ))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        let m = Self::unified_radicand(self, rhs)?;
        let mm = Rational::from_integer(BigInt::from(m));
        let a = &self.a * &rhs.a + &self.b * &rhs.b * mm;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Ok(Self::normalized(a, b, m))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let m = Self::unified_radicand(self, rhs)?;
        // 1/(a+b*sqrt(m)) = (a-b*sqrt(m))/(a^2-b^2 m); the norm is nonzero
        // because m is square-free.
        let mm = Rational::from_integer(BigInt::from(m));
        let norm = &rhs.a * &rhs.a - &rhs.b * &rhs.b * mm;
        let inv = Self::normalized(&rhs.a / &norm, -&rhs.b / &norm, m);
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        Self::one().checked_div(self)
    }

    /// Nonnegative integer power.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact sign of `a + b*sqrt(m)`, computed without floating point by
    /// comparing `a^2` against `b^2 m` when the two terms have mixed signs.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = rational_sign(&self.b);
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        let mm = Rational::from_integer(BigInt::from(self.m));
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * mm;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            // a^2 = b^2 m with m square-free forces a = b = 0, which is
            // excluded here; keep the arm for completeness.
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact square root of a nonnegative rational. Returns a rational when
    /// the input is a perfect square of a rational and a `b*sqrt(m)` form
    /// otherwise.
    pub fn sqrt_exact(&self) -> Result<Self, ExactError> {
        if !self.is_rational() {
            return Err(ExactError::IrrationalSqrt(self.to_string()));
        }
        if self.a.is_negative() {
            return Err(ExactError::NegativeSqrt(self.to_string()));
        }
        if self.a.is_zero() {
            return Ok(Self::zero());
        }
        // sqrt(p/q) = sqrt(p*q)/q.
        let p = self.a.numer().to_biguint().expect("numerator is positive");
        let q = self.a.denom().to_biguint().expect("denominator is positive");
        let (s, m) = square_free_decomposition(&(&p * &q))?;
        let coeff = Rational::new(BigInt::from(s), self.a.denom().clone());
        if m == 1 {
            Ok(Self::from_rational(coeff))
        } else {
            Ok(Self::normalized(Rational::zero(), coeff, m))
        }
    }
}

/// Exact field operation with combinability and division checks.
pub fn arith(x: &ExactScalar, y: &ExactScalar, kind: ArithKind) -> Result<ExactScalar, ExactError> {
    match kind {
        ArithKind::Add => x.checked_add(y),
        ArithKind::Sub => x.checked_sub(y),
        ArithKind::Mul => x.checked_mul(y),
        ArithKind::Div => x.checked_div(y),
    }
}

fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

/// Writes `n = s^2 * m` with `m` square-free; returns `(s, m)`.
///
/// Trial division suffices at the scale the analyses produce. If the
/// square-free part does not fit in `u64` the field model cannot represent
/// the root and we report that instead of approximating.
fn square_free_decomposition(n: &BigUint) -> Result<(BigUint, u64), ExactError> {
    if n.is_zero() {
        return Ok((BigUint::zero(), 0));
    }
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut d = BigUint::from(2u64);
    let limit = BigUint::from(1_000_000u64);
    while &d * &d <= rest && d <= limit {
        let mut exp = 0u64;
        while (&rest % &d).is_zero() {
            rest /= &d;
            exp += 1;
        }
        if exp > 0 {
            for _ in 0..exp / 2 {
                square *= &d;
            }
            if exp % 2 == 1 {
                free *= &d;
            }
        }
        d += 1u64;
    }
    if !rest.is_one() {
        // No factor <= 10^6: rest is prime, a prime square, or a product of
        // two large primes; only the square case is not square-free.
        let root = rest.sqrt();
        if &root * &root == rest {
            square *= root;
        } else {
            free *= rest;
        }
    }
    let m = free.to_u64().ok_or(ExactError::RadicandTooLarge)?;
    Ok((square, m))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                self.$checked(rhs).expect("exact scalar operation")
            }
        }
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            a: -&self.a,
            b: -&self.b,
            m: self.m,
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl PartialOrd for ExactScalar {
    /// Exact order; `None` when the radicands are incompatible.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(other).ok()?;
        Some(match diff.sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }
}

fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let err = || ExactError::Parse(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().map_err(|_| err())?;
            let q: BigInt = q.parse().map_err(|_| err())?;
            if q.is_zero() || q.is_negative() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| err())?;
            Ok(Rational::from_integer(p))
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", format_rational(&self.a))
        } else {
            write!(
                f,
                "({})+({})*sqrt({})",
                format_rational(&self.a),
                format_rational(&self.b),
                self.m
            )
        }
    }
}

impl FromStr for ExactScalar {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, ExactError> {
        let err = || ExactError::Parse(s.to_string());
        if let Some(body) = s.strip_prefix('(') {
            // "(a)+(b)*sqrt(m)"
            let (a_str, rest) = body.split_once(")+(").ok_or_else(err)?;
            let (b_str, m_str) = rest.split_once(")*sqrt(").ok_or_else(err)?;
            let m_str = m_str.strip_suffix(')').ok_or_else(err)?;
            let a = parse_rational(a_str)?;
            let b = parse_rational(b_str)?;
            let m: u64 = m_str.parse().map_err(|_| err())?;
            if m < 2 || b.is_zero() {
                return Err(err());
            }
            let scalar = ExactScalar::with_sqrt(a, b, m)?;
            if scalar.radicand() != m {
                // canonical form requires a square-free radicand
                return Err(err());
            }
            Ok(scalar)
        } else {
            Ok(ExactScalar::from_rational(parse_rational(s)?))
        }
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sqrt2() -> ExactScalar {
        ExactScalar::with_sqrt(Rational::zero(), Rational::one(), 2).unwrap()
    }

    #[test]
    fn rational_addition_reduces() {
        let x = ExactScalar::ratio(1, 2);
        let y = ExactScalar::ratio(1, 3);
        assert_eq!(&x + &y, ExactScalar::ratio(5, 6));
    }

    #[test]
    fn conjugate_division() {
        // 1/(1+sqrt(2)) = -1+sqrt(2)
        let one = ExactScalar::one();
        let denom = &one + &sqrt2();
        let expect = sqrt2() - ExactScalar::one();
        assert_eq!(one.checked_div(&denom).unwrap(), expect);
    }

    #[test]
    fn sqrt_times_sqrt_collapses_radicand() {
        let r = &sqrt2() * &sqrt2();
        assert_eq!(r, ExactScalar::from_int(2));
        assert_eq!(r.radicand(), 0);
    }

    #[test]
    fn arith_div_by_zero() {
        let e = arith(&ExactScalar::one(), &ExactScalar::zero(), ArithKind::Div);
        assert_eq!(e.unwrap_err(), ExactError::DivisionByZero);
    }

    #[test]
    fn arith_incompatible_radicands() {
        let x = sqrt2();
        let y = ExactScalar::with_sqrt(Rational::zero(), Rational::one(), 3).unwrap();
        assert_eq!(
            arith(&x, &y, ArithKind::Add).unwrap_err(),
            ExactError::IncompatibleRadicands(2, 3)
        );
    }

    #[test]
    fn sqrt_exact_cases() {
        assert_eq!(
            ExactScalar::from_int(4).sqrt_exact().unwrap(),
            ExactScalar::from_int(2)
        );
        assert_eq!(ExactScalar::from_int(2).sqrt_exact().unwrap(), sqrt2());
        assert_eq!(
            ExactScalar::ratio(9, 4).sqrt_exact().unwrap(),
            ExactScalar::ratio(3, 2)
        );
        // 8 = 2^2 * 2
        let r = ExactScalar::from_int(8).sqrt_exact().unwrap();
        assert_eq!(r, ExactScalar::from_int(2) * sqrt2());
        assert!(ExactScalar::from_int(-1).sqrt_exact().is_err());
        assert!(sqrt2().sqrt_exact().is_err());
    }

    #[test]
    fn sign_cases() {
        // 3 - 2*sqrt(2) > 0 since 9 > 8
        let x = ExactScalar::from_int(3) - ExactScalar::from_int(2) * sqrt2();
        assert_eq!(x.sign(), 1);
        assert_eq!(ExactScalar::zero().sign(), 0);
        let y = ExactScalar::one() - sqrt2();
        assert_eq!(y.sign(), -1);
    }

    #[test]
    fn canonical_strings_round_trip() {
        for s in ["5/6", "-3/1", "0/1", "(-1/1)+(1/1)*sqrt(2)", "(1/2)+(-2/3)*sqrt(5)"] {
            let x: ExactScalar = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
    }

    #[test]
    fn parse_rejects_junk() {
        for s in ["", "1/0", "1/-2", "(1/1)+(0/1)*sqrt(2)", "(1)+(1)*sqrt(4)", "x"] {
            assert!(s.parse::<ExactScalar>().is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn ordering_is_exact() {
        let x = ExactScalar::from_int(3) - ExactScalar::from_int(2) * sqrt2(); // ~0.17
        let y = ExactScalar::ratio(1, 5);
        assert!(x < y);
        assert!(ExactScalar::ratio(1, 6) < x);
    }

    fn arb_scalar(m: u64) -> impl Strategy<Value = ExactScalar> {
        (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(move |(an, ad, bn, bd)| {
            ExactScalar::with_sqrt(
                Rational::new(big(an), big(ad)),
                Rational::new(big(bn), big(bd)),
                m,
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_scalar(5), y in arb_scalar(5), z in arb_scalar(5)) {
            prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
            prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
            prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
            prop_assert_eq!(&x + &ExactScalar::zero(), x.clone());
            prop_assert_eq!(&x * &ExactScalar::one(), x.clone());
            prop_assert_eq!(&x - &x, ExactScalar::zero());
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.inv().unwrap(), ExactScalar::one());
            }
        }

        #[test]
        fn sign_is_multiplicative(x in arb_scalar(3), y in arb_scalar(3)) {
            prop_assert_eq!(x.sign() * y.sign(), (&x * &y).sign());
        }

        #[test]
        fn sqrt_squares_back(n in 0i64..=400, d in 1i64..=20) {
            let x = ExactScalar::ratio(n, d);
            let r = x.sqrt_exact().unwrap();
            prop_assert_eq!(&r * &r, x);
            prop_assert!(r.sign() >= 0);
        }
    }
}
