use super::ExactScalar;

/// Commutative Q-algebra operations needed to substitute into a polynomial.
pub trait Ring: Clone {
    fn from_scalar(c: ExactScalar) -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &ExactScalar) -> Self;

    fn ring_one() -> Self {
        Self::from_scalar(num_traits::One::one())
    }

    fn ring_zero() -> Self {
        Self::from_scalar(num_traits::Zero::zero())
    }
}

impl Ring for ExactScalar {
    fn from_scalar(c: ExactScalar) -> Self {
        c
    }

    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }

    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }

    fn scale(&self, c: &ExactScalar) -> Self {
        self * c
    }
}
