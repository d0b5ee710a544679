//! Scalar backends.
//!
//! Everything in the crate is generic over [`Scalar`], implemented for exact
//! rationals ([`Rational`]) and for `f64`. The exact backend never rounds;
//! operations that would leave the rationals (square roots of non-squares)
//! report [`Error::NotExact`] instead of approximating.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `true` for backends with exact arithmetic.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).checked_div(&Self::from_i64(den)).expect("nonzero denominator")
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self>;

    fn abs(&self) -> Self;

    /// Square root, `None` for negative input or, on the exact backend, for
    /// rationals that are not perfect squares.
    fn sqrt(&self) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Equality with an absolute tolerance; exact backends ignore `tol`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    fn is_negligible(&self, tol: f64) -> bool {
        self.approx_eq(&Self::zero(), tol)
    }

    fn signum_i(&self, tol: f64) -> i32 {
        if self.is_negligible(tol) {
            0
        } else if *self > Self::zero() {
            1
        } else {
            -1
        }
    }

    /// Fourth root of a non-negative value.
    fn root4(&self) -> Option<Self> {
        self.sqrt().and_then(|s| s.sqrt())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self / rhs)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            Some(Rational::new(rn, rd))
        } else {
            None
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if *rhs == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self / rhs)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(f64::sqrt(*self))
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
}

/// Parses `"3/4"`, `"-2"` or a decimal such as `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Invalid(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Invalid(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| Error::Invalid(format!("bad decimal {s:?}")))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| Error::Invalid(format!("bad rational {s:?}")))?;
    Ok(Rational::from_integer(n))
}

/// Canonical string form used by the JSON documents: `"p/q"` or `"p"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// Complex number over a real backend; houses the coefficients of complex
/// decomposable forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexScalar<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> ComplexScalar<S> {
    pub fn new(re: S, im: S) -> Self {
        Self { re, im }
    }

    pub fn real(re: S) -> Self {
        Self { re, im: S::zero() }
    }

    pub fn i() -> Self {
        Self { re: S::zero(), im: S::one() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> S {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: self.re.clone() + o.re.clone(), im: self.im.clone() + o.im.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: self.re.clone() - o.re.clone(), im: self.im.clone() - o.im.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone(),
        }
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        let n = o.norm_sqr();
        let num = self.mul(&o.conj());
        Ok(Self { re: num.re.checked_div(&n)?, im: num.im.checked_div(&n)? })
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(rat(9, 4).sqrt(), Some(rat(3, 2)));
        assert_eq!(rat(2, 1).sqrt(), None);
        assert_eq!(rat(-4, 1).sqrt(), None);
        assert_eq!(rat(16, 81).root4(), Some(rat(2, 3)));
        assert_eq!(rat(4, 1).root4(), None);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(rat(1, 1).checked_div(&rat(0, 1)), Err(Error::DivisionByZero));
        assert_eq!(1.0f64.checked_div(&0.0), Err(Error::DivisionByZero));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(-3, 4)), "-3/4");
        assert_eq!(format_rational(&rat(5, 1)), "5");
    }

    #[test]
    fn complex_conjugation_is_involution() {
        let z = ComplexScalar::new(rat(1, 2), rat(-3, 1));
        assert_eq!(z.conj().conj(), z);
        let w = ComplexScalar::new(rat(2, 1), rat(1, 1));
        assert_eq!(z.mul(&w).conj(), z.conj().mul(&w.conj()));
        assert_eq!(z.mul(&w).checked_div(&w).unwrap(), z);
    }
}
