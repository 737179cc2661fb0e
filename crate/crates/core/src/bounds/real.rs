//! Certified real enclosures with rational endpoints.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::ExactScalar;

/// A closed interval `[lo, hi]` known to contain a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: ExactScalar,
    hi: ExactScalar,
}

impl Enclosure {
    pub fn exact(x: ExactScalar) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn int(n: i64) -> Self {
        Self::exact(BigRational::from_integer(n.into()))
    }

    pub fn new(lo: ExactScalar, hi: ExactScalar) -> Self {
        assert!(lo <= hi, "empty enclosure");
        Self { lo, hi }
    }

    pub fn lo(&self) -> &ExactScalar {
        &self.lo
    }

    pub fn hi(&self) -> &ExactScalar {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// The value itself when the enclosure is a single point.
    pub fn as_exact(&self) -> Option<&ExactScalar> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> ExactScalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> ExactScalar {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    /// Width divided by the magnitude of the midpoint (the plain width at zero).
    pub fn relative_width(&self) -> f64 {
        let mid = self.midpoint().abs();
        let w = self.width();
        if mid.is_zero() {
            w.to_f64().unwrap_or(f64::INFINITY)
        } else {
            (w / mid).to_f64().unwrap_or(f64::INFINITY)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, x: &ExactScalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `Some(true)` if certainly `self > other`, `Some(false)` if certainly
    /// not, `None` when the enclosures overlap.
    pub fn gt(&self, other: &Enclosure) -> Option<bool> {
        if self.lo > other.hi {
            Some(true)
        } else if self.hi <= other.lo {
            Some(false)
        } else {
            None
        }
    }

    /// `Some(true)` if certainly `self ≤ other`, `Some(false)` if certainly not.
    pub fn le(&self, other: &Enclosure) -> Option<bool> {
        other.ge(self)
    }

    pub fn ge(&self, other: &Enclosure) -> Option<bool> {
        if self.lo >= other.hi {
            Some(true)
        } else if self.hi < other.lo {
            Some(false)
        } else {
            None
        }
    }

    /// Enclosure of `x^e` for `x ≥ 0` (`x > 0` when `e ≤ 0`).
    pub fn pow(x: &ExactScalar, e: &ExactScalar) -> Self {
        assert!(!x.is_negative(), "negative base");
        if x.is_zero() {
            assert!(e.is_positive(), "zero to a non-positive power");
            return Self::int(0);
        }
        let whole = e.floor();
        let frac = e - &whole;
        let n = whole.to_integer().to_i32().expect("exponent out of range");
        let integral = Self::exact(x.pow(n));
        if frac.is_zero() {
            return integral;
        }
        let p = frac.numer().to_i32().expect("exponent numerator out of range");
        let q = frac.denom().to_u32().expect("exponent denominator out of range");
        &integral * &root(&x.pow(p), q)
    }

    /// Enclosure of `self^e` over the whole interval, for `self ≥ 0`.
    pub fn powr(&self, e: &ExactScalar) -> Self {
        if self.is_exact() {
            return Self::pow(&self.lo, e);
        }
        let (a, b) = (Self::pow(&self.lo, e), Self::pow(&self.hi, e));
        if e.is_negative() {
            Self::new(b.lo, a.hi)
        } else {
            Self::new(a.lo, b.hi)
        }
    }

    /// Square root of an exact nonnegative rational.
    pub fn sqrt(x: &ExactScalar) -> Self {
        Self::pow(x, &BigRational::new(1.into(), 2.into()))
    }
}

/// Enclosure of the positive `q`-th root of `x > 0`.
fn root(x: &ExactScalar, q: u32) -> Enclosure {
    if q <= 64 {
        let (a, b) = (x.numer(), x.denom());
        let (ra, rb) = (a.nth_root(q), b.nth_root(q));
        if num_traits::pow(ra.clone(), q as usize) == *a && num_traits::pow(rb.clone(), q as usize) == *b {
            return Enclosure::exact(BigRational::new(ra, rb));
        }
    }
    // integer root of x·2^(bits·q), widening the scale until 100 significant bits
    let mut bits: u64 = 64;
    loop {
        let scaled = (x.numer() << (bits * q as u64)) / x.denom();
        let r = scaled.nth_root(q);
        if r.bits() >= 100 {
            let unit = BigRational::from_integer(BigInt::one() << bits);
            let lo = BigRational::from_integer(r.clone()) / &unit;
            let hi = BigRational::from_integer(r + 1) / unit;
            return Enclosure::new(lo, hi);
        }
        bits += 64;
    }
}

impl From<ExactScalar> for Enclosure {
    fn from(x: ExactScalar) -> Self {
        Self::exact(x)
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, o: &Enclosure) -> Enclosure {
        let products = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = products.iter().min().expect("nonempty").clone();
        let hi = products.iter().max().expect("nonempty").clone();
        Enclosure { lo, hi }
    }
}

impl Div for &Enclosure {
    type Output = Enclosure;
    /// Division by an enclosure that excludes zero.
    fn div(self, o: &Enclosure) -> Enclosure {
        assert!(o.lo.is_positive() || o.hi.is_negative(), "division by an enclosure of zero");
        let inv = Enclosure { lo: o.hi.recip(), hi: o.lo.recip() };
        self * &inv
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(x) = self.as_exact() {
            if x.is_integer() {
                return write!(f, "{}", x.numer());
            }
        }
        write!(f, "{}", self.to_f64())
    }
}
