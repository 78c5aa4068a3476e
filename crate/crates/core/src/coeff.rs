//! Coefficient backends: arbitrary-precision rationals for identity checks
//! and `f64` (with compensated summation) for large-order asymptotics.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rational = BigRational;

/// Field operations needed by the series and table code.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for backends whose arithmetic is exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn from_usize(k: usize) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(k)))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn div_ref(&self, other: &Self) -> Self {
        self.clone() / other.clone()
    }

    /// Sum of an iterator. The `f64` backend overrides this with Neumaier
    /// summation.
    fn sum_iter<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Self::zero(), |acc, x| acc + x)
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    /// Equality up to the backend's resolution: exact for rationals,
    /// absolute `tol` for floats.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_f64() - other.to_f64()).abs() <= tol
        }
    }

    /// Human-readable form; rationals print as `p/q`.
    fn render(&self) -> String;
}

impl Coeff for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Coeff for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_usize(k: usize) -> Self {
        k as f64
    }

    fn sum_iter<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        neumaier_sum(iter)
    }

    fn render(&self) -> String {
        format!("{self:e}")
    }
}

/// Neumaier's variant of Kahan summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in iter {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"0.25"` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::BadRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if s.contains('/') || frac_part.is_empty() && int_part.is_empty() {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac_part}");
        let num =
            BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let r = Rational::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    let r = Rational::from_str(s).map_err(|_| bad())?;
    Ok(r)
}
