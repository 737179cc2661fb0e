//! Exact arithmetic substrate: rationals, polynomials over Q, restriction of
//! polynomials to affine flats, Sturm root counting and bivariate resultants.
//!
//! Nothing in this module touches floating point.

mod bipoly;
mod multipoly;
mod ring;
mod roots;
mod sturm;
pub(crate) mod unipoly;

pub use bipoly::{bezout_point_check, resultant, BezoutReport, BiPoly, Variable};
pub use multipoly::{Exponent, MultiPoly4};
pub use ring::Ring;
pub use roots::product_root_samples;
pub use sturm::{isolate_real_roots, separating_samples, sturm_root_count, Endpoint, RootInterval, SturmSequence};
pub use unipoly::UniPoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational in canonical reduced form (positive denominator).
pub type ExactScalar = BigRational;

/// A point or vector in R⁴.
pub type Vec4 = [ExactScalar; 4];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("operation is undefined on the zero polynomial")]
    ZeroPolynomial,
}

/// Integer as an exact scalar.
pub fn int(n: i64) -> ExactScalar {
    BigRational::from_integer(BigInt::from(n))
}

/// `num / den` as an exact scalar. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn vec4(coords: [i64; 4]) -> Vec4 {
    coords.map(int)
}

pub fn zero4() -> Vec4 {
    std::array::from_fn(|_| ExactScalar::zero())
}

pub fn dot4(a: &Vec4, b: &Vec4) -> ExactScalar {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add4(a: &Vec4, b: &Vec4) -> Vec4 {
    std::array::from_fn(|i| &a[i] + &b[i])
}

pub fn sub4(a: &Vec4, b: &Vec4) -> Vec4 {
    std::array::from_fn(|i| &a[i] - &b[i])
}

pub fn scale4(a: &Vec4, s: &ExactScalar) -> Vec4 {
    std::array::from_fn(|i| &a[i] * s)
}

pub fn is_zero4(a: &Vec4) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Sign of a rational as -1, 0 or +1.
pub fn sign_of(x: &ExactScalar) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Parse a rational written as `"n"`, `"n/d"` or a finite decimal like `"-0.125"`.
pub fn parse_rational(text: &str) -> Option<ExactScalar> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return None;
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(num, den));
    }
    let n: BigInt = text.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// Cauchy bound: every complex root of the polynomial with these coefficients
/// (lowest degree first, nonzero leading term) has modulus strictly below the result.
pub(crate) fn cauchy_bound(coeffs: &[ExactScalar]) -> ExactScalar {
    let lead = coeffs.last().expect("nonempty").abs();
    let max = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(ExactScalar::zero(), |acc, c| if c > acc { c } else { acc });
    max + ExactScalar::one() + ExactScalar::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("-7/2"), Some(ratio(-7, 2)));
        assert_eq!(parse_rational("0.1"), Some(ratio(1, 10)));
        assert_eq!(parse_rational("-0.125"), Some(ratio(-1, 8)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn canonical_form_is_reduced() {
        let x = ratio(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(x.to_string(), "-3/2");
    }
}

/// Serde adapter writing rationals as `"num/den"` strings (`"3"`, `"-7/2"`).
pub mod rational_serde {
    use super::{parse_rational, ExactScalar};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &ExactScalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactScalar, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| D::Error::custom(format!("invalid rational {text:?}")))
    }

    /// Same encoding for fixed-size arrays of rationals.
    pub mod array {
        use super::*;
        use serde::ser::SerializeTuple;

        pub fn serialize<S: Serializer, const N: usize>(xs: &[ExactScalar; N], s: S) -> Result<S::Ok, S::Error> {
            let mut t = s.serialize_tuple(N)?;
            for x in xs {
                t.serialize_element(&x.to_string())?;
            }
            t.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[ExactScalar; N], D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            if texts.len() != N {
                return Err(D::Error::custom(format!("expected {N} rationals, found {}", texts.len())));
            }
            let mut out = Vec::with_capacity(N);
            for t in &texts {
                out.push(parse_rational(t).ok_or_else(|| D::Error::custom(format!("invalid rational {t:?}")))?);
            }
            Ok(out.try_into().expect("length checked"))
        }
    }
}
