//! Sturm sequences: exact counting and isolation of distinct real roots.

use std::cmp::Ordering;

use num_traits::One;

use super::{cauchy_bound, int, ExactError, ExactScalar, UniPoly};

/// Interval endpoint on the extended real line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    NegInf,
    Finite(ExactScalar),
    PosInf,
}

impl From<ExactScalar> for Endpoint {
    fn from(x: ExactScalar) -> Self {
        Endpoint::Finite(x)
    }
}

impl PartialOrd for Endpoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Endpoint {
    fn cmp(&self, other: &Self) -> Ordering {
        use Endpoint::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

/// Half-open interval `(lo, hi]` holding exactly one real root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: ExactScalar,
    pub hi: ExactScalar,
}

/// Sturm chain of the square-free part of a nonzero polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    chain: Vec<UniPoly>,
}

impl SturmSequence {
    pub fn new(f: &UniPoly) -> Result<Self, ExactError> {
        if f.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let p0 = f.square_free().primitive();
        let mut chain = vec![p0.clone()];
        if p0.degree() > 0 {
            chain.push(p0.derivative().primitive());
            loop {
                let n = chain.len();
                let r = chain[n - 2].div_rem(&chain[n - 1]).1;
                if r.is_zero() {
                    break;
                }
                chain.push((-&r).primitive());
            }
        }
        Ok(Self { chain })
    }

    /// The square-free polynomial whose roots are counted.
    pub fn base(&self) -> &UniPoly {
        &self.chain[0]
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Number of sign changes along the chain at `at`, zeros dropped.
    pub fn variations(&self, at: &Endpoint) -> usize {
        let signs = self.chain.iter().map(|p| match at {
            Endpoint::NegInf => p.sign_at_neg_inf(),
            Endpoint::PosInf => p.sign_at_pos_inf(),
            Endpoint::Finite(x) => p.sign_at(x),
        });
        let mut count = 0;
        let mut last = 0i8;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in `(lo, hi]`.
    pub fn count(&self, lo: &Endpoint, hi: &Endpoint) -> usize {
        if lo >= hi {
            return 0;
        }
        self.variations(lo) - self.variations(hi)
    }

    fn count_finite(&self, lo: &ExactScalar, hi: &ExactScalar) -> usize {
        self.count(&Endpoint::Finite(lo.clone()), &Endpoint::Finite(hi.clone()))
    }
}

/// Number of distinct real roots of `f` in `(lo, hi]`; with infinite
/// endpoints this is the total number of distinct real roots.
pub fn sturm_root_count(f: &UniPoly, lo: &Endpoint, hi: &Endpoint) -> Result<usize, ExactError> {
    Ok(SturmSequence::new(f)?.count(lo, hi))
}

/// Disjoint isolating intervals for every distinct real root, in increasing order.
pub fn isolate_real_roots(f: &UniPoly) -> Result<Vec<RootInterval>, ExactError> {
    let seq = SturmSequence::new(f)?;
    Ok(isolate_with(&seq))
}

fn isolate_with(seq: &SturmSequence) -> Vec<RootInterval> {
    let base = seq.base();
    if base.degree() <= 0 {
        return Vec::new();
    }
    let bound = cauchy_bound(base.coeffs());
    let two = int(2);
    let mut out = Vec::new();
    // (lo, hi] with known count, processed left to right
    let mut stack = vec![(-bound.clone(), bound.clone(), seq.count_finite(&-bound.clone(), &bound))];
    while let Some((lo, hi, n)) = stack.pop() {
        match n {
            0 => {}
            1 => out.push(RootInterval { lo, hi }),
            _ => {
                let mid = (&lo + &hi) / &two;
                let left = seq.count_finite(&lo, &mid);
                stack.push((mid.clone(), hi, n - left));
                stack.push((lo, mid, left));
            }
        }
    }
    out
}

/// One rational strictly inside each open interval of the real line cut out
/// by the distinct real roots of `f`: `k` roots give `k + 1` samples, none a root.
pub fn separating_samples(f: &UniPoly) -> Result<Vec<ExactScalar>, ExactError> {
    let seq = SturmSequence::new(f)?;
    let base = seq.base().clone();
    let mut roots = isolate_with(&seq);
    if roots.is_empty() {
        return Ok(vec![ExactScalar::from_integer(0.into())]);
    }
    let bound = cauchy_bound(base.coeffs());
    let one = ExactScalar::one();
    let two = int(2);
    let mut samples = vec![-&bound - &one];
    for i in 0..roots.len() - 1 {
        loop {
            let a = roots[i].hi.clone();
            let b = roots[i + 1].lo.clone();
            if a < b {
                samples.push((a + b) / &two);
                break;
            }
            if base.sign_at(&a) != 0 {
                samples.push(a);
                break;
            }
            // root i sits exactly on the shared endpoint; shrink interval i+1
            let next = &mut roots[i + 1];
            let mid = (&next.lo + &next.hi) / &two;
            if seq.count_finite(&next.lo, &mid) == 1 {
                next.hi = mid;
            } else {
                next.lo = mid;
            }
        }
    }
    samples.push(&bound + &one);
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use Endpoint::*;

    fn fin(n: i64) -> Endpoint {
        Finite(int(n))
    }

    #[test]
    fn spec_examples() {
        let f = UniPoly::from_ints(&[-1, 0, 1]);
        assert_eq!(sturm_root_count(&f, &fin(-2), &fin(2)).unwrap(), 2);
        let g = UniPoly::from_ints(&[1, 0, 1]);
        assert_eq!(sturm_root_count(&g, &NegInf, &PosInf).unwrap(), 0);
        let h = UniPoly::from_roots(&[int(1), int(1), int(3)]);
        assert_eq!(sturm_root_count(&h, &fin(0), &fin(4)).unwrap(), 2);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(sturm_root_count(&UniPoly::zero(), &NegInf, &PosInf), Err(ExactError::ZeroPolynomial));
    }

    #[test]
    fn half_open_convention() {
        let f = UniPoly::from_roots(&[int(1), int(2)]);
        assert_eq!(sturm_root_count(&f, &fin(1), &fin(2)).unwrap(), 1);
        assert_eq!(sturm_root_count(&f, &fin(0), &fin(1)).unwrap(), 1);
        assert_eq!(sturm_root_count(&f, &fin(2), &fin(1)).unwrap(), 0);
    }

    #[test]
    fn nonzero_constant_has_no_roots() {
        let f = UniPoly::from_ints(&[7]);
        assert_eq!(sturm_root_count(&f, &NegInf, &PosInf).unwrap(), 0);
        assert!(isolate_real_roots(&f).unwrap().is_empty());
        assert_eq!(separating_samples(&f).unwrap().len(), 1);
    }

    #[test]
    fn isolation_brackets_rational_roots() {
        let roots = [ratio(-7, 3), int(0), ratio(1, 2), int(5)];
        let f = UniPoly::from_roots(&roots);
        let iv = isolate_real_roots(&f).unwrap();
        assert_eq!(iv.len(), 4);
        for (r, i) in roots.iter().zip(&iv) {
            assert!(&i.lo < r && r <= &i.hi);
        }
    }

    #[test]
    fn samples_separate_adjacent_exact_roots() {
        // roots at bisection points of the Cauchy interval
        let f = UniPoly::from_roots(&[int(0), int(1), int(-1)]);
        let s = separating_samples(&f).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.iter().all(|x| f.sign_at(x) != 0));
        let signs: Vec<i8> = s.iter().map(|x| f.sign_at(x)).collect();
        assert_eq!(signs, vec![-1, 1, -1, 1]);
    }
}
