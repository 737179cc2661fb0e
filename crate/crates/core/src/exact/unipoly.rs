use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ring::Ring;
use super::ExactScalar;

/// Dense univariate polynomial, coefficients lowest degree first.
///
/// The leading coefficient is nonzero; the zero polynomial is the empty list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<ExactScalar>,
}

/// Positive factor that turns the given rationals into coprime integers.
pub(crate) fn primitive_factor<'a>(coeffs: impl Iterator<Item = &'a ExactScalar> + Clone) -> ExactScalar {
    let lcm = coeffs.clone().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let gcd = coeffs
        .filter(|c| !c.is_zero())
        .fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&lcm / c.denom()))));
    if gcd.is_zero() {
        return ExactScalar::one();
    }
    BigRational::new(lcm, gcd)
}

impl UniPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `t`.
    pub fn identity() -> Self {
        Self::from_coeffs(vec![ExactScalar::zero(), ExactScalar::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<ExactScalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| super::int(c)).collect())
    }

    /// Monic product of `(t - r)` over the given roots.
    pub fn from_roots(roots: &[ExactScalar]) -> Self {
        roots.iter().fold(Self::constant(ExactScalar::one()), |acc, r| {
            &acc * &Self::from_coeffs(vec![-r.clone(), ExactScalar::one()])
        })
    }

    pub fn coeffs(&self) -> &[ExactScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.coeffs.len() as i32 - 1
    }

    pub fn leading_coeff(&self) -> Option<&ExactScalar> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &ExactScalar) -> ExactScalar {
        self.coeffs.iter().rev().fold(ExactScalar::zero(), |acc, c| acc * t + c)
    }

    pub fn sign_at(&self, t: &ExactScalar) -> i8 {
        super::sign_of(&self.eval(t))
    }

    /// Sign as t → +∞ (0 for the zero polynomial).
    pub fn sign_at_pos_inf(&self) -> i8 {
        self.leading_coeff().map_or(0, super::sign_of)
    }

    /// Sign as t → −∞.
    pub fn sign_at_neg_inf(&self) -> i8 {
        let s = self.sign_at_pos_inf();
        if self.degree() % 2 == 0 {
            s
        } else {
            -s
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * super::int(k as i64)).collect(),
        )
    }

    /// Euclidean division over Q. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let lead = divisor.leading_coeff().expect("division by the zero polynomial");
        let dd = divisor.coeffs.len();
        if self.coeffs.len() < dd {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ExactScalar::zero(); rem.len() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd - 1] / lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd - 1);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Quotient of a division known to be exact.
    pub fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1.primitive();
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            Some(lc) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    /// Positive rescaling to coprime integer coefficients; preserves signs.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&primitive_factor(self.coeffs.iter()))
    }

    /// Product of the distinct irreducible factors, with the original
    /// leading-coefficient sign. Same distinct roots, all simple.
    pub fn square_free(&self) -> Self {
        if self.degree() <= 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).primitive()
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(ExactScalar::one()), |acc, _| &acc * self)
    }
}

impl Ring for UniPoly {
    fn from_scalar(c: ExactScalar) -> Self {
        Self::constant(c)
    }

    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }

    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }

    fn scale(&self, c: &ExactScalar) -> Self {
        UniPoly::scale(self, c)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;

    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = ExactScalar::zero();
        UniPoly::from_coeffs(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;

    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;

    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;

    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![ExactScalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn trims_leading_zeros() {
        let p = UniPoly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(UniPoly::from_ints(&[0, 0]).degree(), -1);
    }

    #[test]
    fn division_identity() {
        let a = UniPoly::from_ints(&[3, -2, 0, 5, 1]);
        let b = UniPoly::from_ints(&[1, 0, 2]);
        let (q, r) = a.div_rem(&b);
        assert!(r.degree() < b.degree());
        assert_eq!(&(&q * &b) + &r, a);
    }

    #[test]
    fn gcd_and_square_free() {
        let f = UniPoly::from_roots(&[int(1), int(1), int(3)]);
        let g = UniPoly::from_roots(&[int(1), int(2)]);
        assert_eq!(f.gcd(&g), UniPoly::from_roots(&[int(1)]));
        assert_eq!(f.square_free(), UniPoly::from_roots(&[int(1), int(3)]));
    }

    #[test]
    fn signs_at_infinity() {
        let p = UniPoly::from_ints(&[0, 0, 0, -2]);
        assert_eq!(p.sign_at_pos_inf(), -1);
        assert_eq!(p.sign_at_neg_inf(), 1);
        assert_eq!(UniPoly::zero().sign_at_pos_inf(), 0);
    }

    #[test]
    fn primitive_rescales_positively() {
        let p = UniPoly::from_coeffs(vec![ratio(-1, 2), ratio(3, 4)]);
        assert_eq!(p.primitive(), UniPoly::from_ints(&[-2, 3]));
    }

    #[test]
    fn display() {
        assert_eq!(UniPoly::from_ints(&[-1, 0, 1]).to_string(), "t^2 - 1");
        assert_eq!(UniPoly::from_ints(&[5]).to_string(), "5");
    }
}
