//! How many cells of a partition a line or a 2-flat passes through.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::One;

use super::{PartitionError, PartitionPolynomial};
use crate::exact::unipoly::primitive_factor;
use crate::exact::{int, product_root_samples, sign_of, BiPoly, ExactScalar};
use crate::geometry::{Flat2, Line4};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingStats {
    pub object: usize,
    /// Open cells the line passes through.
    pub distinct_cells: usize,
    /// Distinct parameters at which the line meets `Z(P)`.
    pub zero_set_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatCrossingStats {
    pub object: usize,
    /// Distinct sign vectors seen at the samples: a lower bound on cells entered.
    pub distinct_cells_lower_bound: usize,
    pub samples: usize,
}

/// Exact count of the open cells met by a line not contained in `Z(P)`.
///
/// Every factor is restricted to the line; the distinct real roots of their
/// product cut the line into intervals, and one rational sample per interval
/// gives that interval's sign vector.
pub fn line_crossing_stats(ln: &Line4, part: &PartitionPolynomial) -> Result<CrossingStats, PartitionError> {
    let mut restricted = Vec::with_capacity(part.rounds());
    for (i, f) in part.factors().iter().enumerate() {
        let r = f.restrict_to_line(ln.base(), ln.direction());
        if r.is_zero() {
            return Err(PartitionError::LineInZeroSet { factor: i });
        }
        restricted.push(r);
    }
    let (hits, samples) = product_root_samples(&restricted);
    let cells: BTreeSet<Vec<i8>> =
        samples.iter().map(|t| restricted.iter().map(|r| r.sign_at(t)).collect()).collect();
    let stats = CrossingStats { object: 0, distinct_cells: cells.len(), zero_set_hits: hits };
    let bound = part.total_degree() + 1;
    if stats.distinct_cells > bound {
        return Err(PartitionError::CrossingBoundViolated { observed: stats.distinct_cells, bound });
    }
    Ok(stats)
}

/// Integer coefficients of a positive multiple of a bivariate polynomial,
/// evaluated homogenized so that samples `(A/q, B/q)` need no rationals.
struct BiIntegerForm {
    degree: u32,
    terms: Vec<([u32; 2], BigInt)>,
}

impl BiIntegerForm {
    fn new(p: &BiPoly) -> Self {
        let coeffs: Vec<&ExactScalar> = p.terms().map(|(_, c)| c).collect();
        let factor = primitive_factor(coeffs.iter().copied());
        Self {
            degree: p.degree().max(0) as u32,
            terms: p.terms().map(|(e, c)| (*e, (c * &factor).to_integer())).collect(),
        }
    }

    fn sign(&self, ap: &[BigInt], bp: &[BigInt], qp: &[BigInt]) -> i8 {
        let v: BigInt = self
            .terms
            .iter()
            .map(|([i, j], c)| c * &ap[*i as usize] * &bp[*j as usize] * &qp[(self.degree - i - j) as usize])
            .sum();
        sign_of(&BigRational::from_integer(v))
    }
}

fn halton(mut i: u64, base: u64) -> ExactScalar {
    let mut value = ExactScalar::from_integer(0.into());
    let mut denom = BigInt::one();
    let b = BigInt::from(base);
    while i > 0 {
        denom *= &b;
        value += BigRational::new(BigInt::from(i % base), denom.clone());
        i /= base;
    }
    value
}

/// Deterministic rational sample `i` of the plane: a Halton point in the
/// square `[-s, s]²`, with the scale `s` cycling through `1, 4, 16, …, 4⁷` so
/// both nearby and distant cells are probed.
fn flat_sample(i: u64) -> (ExactScalar, ExactScalar) {
    let scale = int(1i64 << (2 * (i % 8)));
    let stretch = |h: ExactScalar| (h * int(2) - int(1)) * &scale;
    (stretch(halton(i + 1, 2)), stretch(halton(i + 1, 3)))
}

/// Lower bound on the open cells met by a 2-flat not contained in `Z(P)`,
/// from the sign vectors at `sample_budget` deterministic samples.
pub fn flat2_crossing_stats(
    fl: &Flat2,
    part: &PartitionPolynomial,
    sample_budget: usize,
) -> Result<FlatCrossingStats, PartitionError> {
    let mut restricted: Vec<BiPoly> = Vec::with_capacity(part.rounds());
    for (i, f) in part.factors().iter().enumerate() {
        let r = f.restrict_to_flat2(fl.base(), fl.u(), fl.v());
        if r.is_zero() {
            return Err(PartitionError::FlatInZeroSet { factor: i });
        }
        restricted.push(r);
    }
    let forms: Vec<BiIntegerForm> = restricted.iter().map(BiIntegerForm::new).collect();
    let max_degree = forms.iter().map(|f| f.degree).max().unwrap_or(0);
    let mut seen = BTreeSet::new();
    for i in 0..sample_budget as u64 {
        let (a, b) = flat_sample(i);
        let q = a.denom().lcm(b.denom());
        let powers = |base: BigInt| -> Vec<BigInt> {
            let mut row = vec![BigInt::one()];
            for d in 1..=max_degree as usize {
                let next = &row[d - 1] * &base;
                row.push(next);
            }
            row
        };
        let ap = powers(a.numer() * (&q / a.denom()));
        let bp = powers(b.numer() * (&q / b.denom()));
        let qp = powers(q);
        let sv: Vec<i8> = forms.iter().map(|f| f.sign(&ap, &bp, &qp)).collect();
        if !sv.contains(&0) {
            seen.insert(sv);
        }
    }
    let d = part.total_degree();
    let bound = d * d + d + 1;
    if seen.len() > bound {
        return Err(PartitionError::CrossingBoundViolated { observed: seen.len(), bound });
    }
    Ok(FlatCrossingStats { object: 0, distinct_cells_lower_bound: seen.len(), samples: sample_budget })
}
