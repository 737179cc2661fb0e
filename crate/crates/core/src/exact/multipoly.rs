use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::ring::Ring;
use super::{BiPoly, ExactScalar, UniPoly, Vec4};

/// Exponents of x1..x4 in a monomial.
pub type Exponent = [u32; 4];

/// Sparse polynomial in four variables with rational coefficients.
///
/// No zero coefficient is ever stored, so structural equality is polynomial
/// equality. The zero polynomial has degree -1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiPoly4 {
    terms: BTreeMap<Exponent, ExactScalar>,
    degree: i32,
}

fn total(e: &Exponent) -> i32 {
    e.iter().sum::<u32>() as i32
}

impl MultiPoly4 {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new(), degree: -1 }
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::monomial([0; 4], c)
    }

    /// The coordinate function x_{index+1}.
    pub fn var(index: usize) -> Self {
        let mut e = [0; 4];
        e[index] = 1;
        Self::monomial(e, ExactScalar::one())
    }

    pub fn monomial(exponent: Exponent, coeff: ExactScalar) -> Self {
        Self::from_terms([(exponent, coeff)])
    }

    /// Sum of the given terms; repeated exponents are combined.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, ExactScalar)>) -> Self {
        let mut map: BTreeMap<Exponent, ExactScalar> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(ExactScalar::zero) += c;
        }
        Self::from_map(map)
    }

    fn from_map(mut terms: BTreeMap<Exponent, ExactScalar>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let degree = terms.keys().map(total).max().unwrap_or(-1);
        Self { terms, degree }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: &Exponent) -> ExactScalar {
        self.terms.get(exponent).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self::from_map(self.terms.iter().map(|(e, v)| (*e, v * c)).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(ExactScalar::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `images[i]` for x_{i+1} in any ring containing Q.
    pub fn compose<R: Ring>(&self, images: &[R; 4]) -> R {
        if self.is_zero() {
            return R::ring_zero();
        }
        let max_deg = self.degree as usize;
        let powers: Vec<Vec<R>> = images
            .iter()
            .map(|img| {
                let mut row = Vec::with_capacity(max_deg + 1);
                row.push(R::ring_one());
                for k in 1..=max_deg {
                    let next = row[k - 1].ring_mul(img);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = R::ring_zero();
        for (e, c) in &self.terms {
            let mut term = R::from_scalar(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.ring_mul(&powers[i][k as usize]);
                }
            }
            acc = acc.ring_add(&term);
        }
        acc
    }

    /// Exact value at a point of R⁴.
    pub fn eval(&self, x: &Vec4) -> ExactScalar {
        self.compose(x)
    }

    /// Sign (-1, 0, +1) at a point.
    pub fn sign_at(&self, x: &Vec4) -> i8 {
        super::sign_of(&self.eval(x))
    }

    /// `t ↦ p(base + t·direction)`.
    pub fn restrict_to_line(&self, base: &Vec4, direction: &Vec4) -> UniPoly {
        let images: [UniPoly; 4] =
            std::array::from_fn(|i| UniPoly::from_coeffs(vec![base[i].clone(), direction[i].clone()]));
        self.compose(&images)
    }

    /// `(a, b) ↦ p(base + a·u + b·v)`.
    pub fn restrict_to_flat2(&self, base: &Vec4, u: &Vec4, v: &Vec4) -> BiPoly {
        let images: [BiPoly; 4] = std::array::from_fn(|i| {
            BiPoly::from_terms([([0, 0], base[i].clone()), ([1, 0], u[i].clone()), ([0, 1], v[i].clone())])
        });
        self.compose(&images)
    }

    /// Positive rescaling with integer, content-free coefficients. Signs at
    /// every point are unchanged.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let factor = super::unipoly::primitive_factor(self.terms.values());
        self.scale(&factor)
    }
}

impl Ring for MultiPoly4 {
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
        MultiPoly4::scale(self, c)
    }
}

impl Add for &MultiPoly4 {
    type Output = MultiPoly4;

    fn add(self, rhs: &MultiPoly4) -> MultiPoly4 {
        let mut map = self.terms.clone();
        for (e, c) in &rhs.terms {
            *map.entry(*e).or_insert_with(ExactScalar::zero) += c;
        }
        MultiPoly4::from_map(map)
    }
}

impl Neg for &MultiPoly4 {
    type Output = MultiPoly4;

    fn neg(self) -> MultiPoly4 {
        MultiPoly4 { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(), degree: self.degree }
    }
}

impl Sub for &MultiPoly4 {
    type Output = MultiPoly4;

    fn sub(self, rhs: &MultiPoly4) -> MultiPoly4 {
        self + &(-rhs)
    }
}

impl Mul for &MultiPoly4 {
    type Output = MultiPoly4;

    fn mul(self, rhs: &MultiPoly4) -> MultiPoly4 {
        let mut map: BTreeMap<Exponent, ExactScalar> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = std::array::from_fn(|i| ea[i] + eb[i]);
                *map.entry(e).or_insert_with(ExactScalar::zero) += ca * cb;
            }
        }
        MultiPoly4::from_map(map)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for MultiPoly4 {
            type Output = MultiPoly4;

            fn $method(self, rhs: MultiPoly4) -> MultiPoly4 {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for MultiPoly4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // highest total degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| total(b.0).cmp(&total(a.0)).then(b.0.cmp(a.0)));
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, p) })
                .collect();
            if monomial.is_empty() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write!(f, "{}", monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, vec4};

    fn x(i: usize) -> MultiPoly4 {
        MultiPoly4::var(i)
    }

    fn c(n: i64) -> MultiPoly4 {
        MultiPoly4::constant(int(n))
    }

    #[test]
    fn eval_examples() {
        assert_eq!(x(0).eval(&vec4([0, 0, 0, 0])), int(0));
        let p = &(&x(0).pow(2) + &x(3)) - &c(1);
        assert_eq!(p.eval(&vec4([2, 0, 0, 1])), int(4));
        let q = &(&x(0) - &c(1)) * &(&x(1) - &c(3));
        assert_eq!(q.eval(&vec4([1, 7, 0, 0])), int(0));
    }

    #[test]
    fn zero_polynomial_conventions() {
        let z = &x(0) - &x(0);
        assert!(z.is_zero());
        assert_eq!(z.degree(), -1);
        assert_eq!(z.num_terms(), 0);
        assert_eq!(z, MultiPoly4::zero());
    }

    #[test]
    fn restrict_to_line_examples() {
        let p = &(&x(0).pow(2) + &x(3)) - &c(1);
        let f = p.restrict_to_line(&vec4([0, 0, 0, 0]), &vec4([1, 0, 0, 0]));
        assert_eq!(f, UniPoly::from_ints(&[-1, 0, 1]));

        let f = x(1).restrict_to_line(&vec4([0, 5, 0, 0]), &vec4([1, 0, 0, 0]));
        assert_eq!(f, UniPoly::from_ints(&[5]));

        let p = &(&x(0) * &x(1)) - &c(1);
        let f = p.restrict_to_line(&vec4([0, 0, 0, 0]), &vec4([1, 1, 0, 0]));
        assert_eq!(f, UniPoly::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn restrict_to_flat2_examples() {
        let base = vec4([0, 0, 0, 0]);
        let u = vec4([1, 0, 0, 0]);
        let v = vec4([0, 1, 0, 0]);
        assert!(x(3).restrict_to_flat2(&base, &u, &v).is_zero());

        let p = &(&x(0).pow(2) + &x(1).pow(2)) - &c(1);
        let g = p.restrict_to_flat2(&base, &u, &v);
        assert_eq!(g, BiPoly::from_terms([([2, 0], int(1)), ([0, 2], int(1)), ([0, 0], int(-1))]));

        let g = (&x(2) - &c(2)).restrict_to_flat2(&base, &u, &v);
        assert_eq!(g, BiPoly::from_terms([([0, 0], int(-2))]));
    }

    #[test]
    fn display_is_readable() {
        let p = &(&x(0).pow(2) + &x(3)) - &c(1);
        assert_eq!(p.to_string(), "x1^2 + x4 - 1");
        assert_eq!(MultiPoly4::zero().to_string(), "0");
    }

    #[test]
    fn primitive_keeps_sign() {
        let p = MultiPoly4::from_terms([([1, 0, 0, 0], crate::exact::ratio(3, 4)), ([0; 4], crate::exact::ratio(-9, 2))]);
        let q = p.primitive();
        assert_eq!(q, MultiPoly4::from_terms([([1, 0, 0, 0], int(1)), ([0; 4], int(-6))]));
    }
}
