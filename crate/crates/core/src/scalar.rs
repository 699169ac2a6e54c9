//! Scalar fields used throughout the crate.
//!
//! Everything geometric is generic over [`Scalar`], which is implemented for
//! [`Exact`] (arbitrary precision rationals) and `f64`. Exact arithmetic is
//! used to certify rational identities; `f64` drives the numerical dynamics.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// Arbitrary precision rational number.
pub type Exact = BigRational;

/// Relative tolerance used by approximate degeneracy tests.
pub const DEFAULT_TOL: f64 = 1e-12;

/// The arithmetic shared by scalars and dual numbers.
pub trait Field:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

/// A field element with ordering and conversion helpers.
pub trait Scalar: Field + PartialOrd + Send + Sync + 'static {
    /// `true` for exact rational arithmetic.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Nearest representable value (exact for both kinds: every finite
    /// float is a rational).
    fn from_f64(v: f64) -> Self;

    fn abs(&self) -> Self;

    fn is_exact_zero(&self) -> bool;

    /// Zero test. Exact scalars compare with zero; floats use
    /// `|v| <= tol * scale`.
    fn is_negligible(&self, scale: f64, tol: f64) -> bool;

    /// Real cube root. `None` when the root is not representable (irrational
    /// root of an exact rational).
    fn cbrt(&self) -> Option<Self>;

    /// Rendering used by reports: `p/q` for exact values, 17 significant
    /// digits for floats.
    fn render(&self) -> String;

    /// A convenient representative of the scale class of `t`: primitive
    /// integer triple for exact values, unit length for floats.
    fn reduce_triple(t: [Self; 3]) -> [Self; 3];

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn negligible(&self, scale: f64) -> bool {
        self.is_negligible(scale, DEFAULT_TOL)
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        f64::abs(*self) <= tol * scale
    }

    fn cbrt(&self) -> Option<Self> {
        Some(f64::cbrt(*self))
    }

    fn render(&self) -> String {
        format_f64(*self)
    }

    fn reduce_triple(t: [Self; 3]) -> [Self; 3] {
        let n = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
        if n == 0.0 || !n.is_finite() {
            return t;
        }
        t.map(|v| v / n)
    }
}

impl Field for Exact {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }

    fn is_negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }

    fn cbrt(&self) -> Option<Self> {
        let numer = exact_icbrt(self.numer())?;
        let denom = exact_icbrt(self.denom())?;
        Some(BigRational::new(numer, denom))
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn reduce_triple(t: [Self; 3]) -> [Self; 3] {
        let lcm = t.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = t.each_ref().map(|c| c.numer() * (&lcm / c.denom()));
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        if g.is_zero() {
            return t;
        }
        ints.map(|v| BigRational::from_integer(v / &g))
    }
}

fn exact_icbrt(v: &BigInt) -> Option<BigInt> {
    let root = v.cbrt();
    (&root * &root * &root == *v).then_some(root)
}

/// Formats a float with 17 significant digits, the shortest form that
/// round-trips every `f64`.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    format!("{v:.16e}")
}

/// Parses `p/q`, integers and terminating decimals into an exact rational.
pub fn parse_exact(text: &str) -> Result<Exact, Error> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(text) {
        return Ok(BigRational::from_integer(n));
    }
    // decimal, optionally with exponent
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (
            &text[..pos],
            text[pos + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').ok_or_else(bad)?;
    if frac_part.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" || digits.is_empty() {
        return Err(bad());
    } else {
        digits
    };
    let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Parses a float, or an exact rational converted to the nearest float.
pub fn parse_f64(text: &str) -> Result<f64, Error> {
    if let Ok(v) = text.trim().parse::<f64>() {
        return Ok(v);
    }
    Ok(Scalar::to_f64(&parse_exact(text)?))
}

/// Conversion between the two scalar kinds.
pub trait FromExact: Sized {
    fn from_exact(v: &Exact) -> Self;
}

impl FromExact for f64 {
    fn from_exact(v: &Exact) -> Self {
        Scalar::to_f64(v)
    }
}

impl FromExact for Exact {
    fn from_exact(v: &Exact) -> Self {
        v.clone()
    }
}

/// Shorthand for an exact rational `num/den`.
pub fn q(num: i64, den: i64) -> Exact {
    Exact::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_exact("-20/21").unwrap(), q(-20, 21));
        assert_eq!(parse_exact("6/4").unwrap(), q(3, 2));
        assert_eq!(parse_exact("3").unwrap(), q(3, 1));
        assert_eq!(parse_exact("-0.05").unwrap(), q(-1, 20));
        assert_eq!(parse_exact("1.5e2").unwrap(), q(150, 1));
        assert_eq!(parse_exact("2.5e-1").unwrap(), q(1, 4));
        assert!(matches!(parse_exact("1/0"), Err(Error::DivisionByZero)));
        assert!(parse_exact("abc").is_err());
        assert!(parse_exact("1.2.3").is_err());
    }

    #[test]
    fn exact_cube_roots() {
        assert_eq!(q(-8, 27).cbrt(), Some(q(-2, 3)));
        assert_eq!(q(1, 1).cbrt(), Some(q(1, 1)));
        assert_eq!(q(2, 1).cbrt(), None);
        assert_eq!(Scalar::cbrt(&-8.0f64), Some(-2.0));
    }

    #[test]
    fn rendering() {
        assert_eq!(q(-20, 21).render(), "-20/21");
        assert_eq!(q(40, 3).render(), "40/3");
        assert_eq!(q(4, 1).render(), "4");
        assert_eq!(format_f64(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(format_f64(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
