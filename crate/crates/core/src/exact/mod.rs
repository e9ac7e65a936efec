//! Exact scalars: big rationals, polynomials in the spectral parameter,
//! rational functions, and dense matrices over any of them.

mod matrix;
mod polynomial;
mod ratfunc;

pub use matrix::{mul_via_integers, Matrix};
pub use polynomial::ExactPolynomial;
pub use ratfunc::RationalFunction;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `num/den` as a reduced big rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"`, `"a"` or `"-a/b"` into a reduced rational.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let err = |reason: &str| Error::ParseRational {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s = input.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `num/den` string; integers keep the `/1` so the format is uniform.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn to_f64(r: &Rational) -> f64 {
    // Scale down both parts when they overflow f64 on their own.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let bits = r.numer().bits().max(r.denom().bits()) as i64;
            let shift = (bits - 900).max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Commutative ring operations shared by every scalar the matrix layer
/// works over.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    /// Multiplicative inverse when it exists inside the scalar type.
    fn try_recip(&self) -> Option<Self> {
        None
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.plus(other);
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        if a.is_nil() || b.is_nil() {
            return;
        }
        *self = self.plus(&a.times(b));
    }
}

impl Scalar for Rational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
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
    fn negated(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn try_recip(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

impl Scalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
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
    fn negated(&self) -> Self {
        -self
    }
    /// Only integral rationals have a faithful image; the fractional part is
    /// truncated.
    fn from_rational(r: &Rational) -> Self {
        r.to_integer()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        if Zero::is_zero(a) || Zero::is_zero(b) {
            return;
        }
        *self += a * b;
    }
}

/// `(sign * x + shift)` for a scalar `x`, used to build shifted spectral
/// arguments like `x - y`, `-z - 1` or `2z`.
pub fn affine<S: Scalar>(x: &S, scale: &Rational, shift: &Rational) -> S {
    x.times(&S::from_rational(scale)).plus(&S::from_rational(shift))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_rational("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("-4/6").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert_eq!(format_rational(&rat(-15, 49)), "-15/49");
        assert_eq!(format_rational(&int(3)), "3/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn zero_is_unique() {
        assert_eq!(rat(0, 7), rat(0, 1));
        assert_eq!(rat(0, -3).denom(), &BigInt::from(1));
        assert_eq!(rat(3, -6), rat(-1, 2));
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let big = Rational::new(BigInt::from(3) << 2000, BigInt::from(2) << 2000);
        assert!((to_f64(&big) - 1.5).abs() < 1e-12);
    }
}
