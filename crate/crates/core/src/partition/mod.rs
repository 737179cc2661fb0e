//! Polynomial partitioning of finite point sets in R⁴.
//!
//! A partition is a product of `J` factors found one round at a time: round
//! `j` bisects every cell of the previous rounds simultaneously with one
//! polynomial, found by a ham-sandwich search in Veronese-lifted space.
//! Cells are sign vectors of the factors, so membership is exactly
//! computable.

mod crossing;
mod lift;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{parse_rational, Exponent, ExactScalar, MultiPoly4, Vec4};

pub use crossing::{flat2_crossing_stats, line_crossing_stats, CrossingStats, FlatCrossingStats};
pub use lift::{lift_dimension, monomial_exponents, veronese_lift, SearchBudget};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("invalid partition parameters: {0}")]
    InvalidParams(String),
    #[error("{sets} sets cannot be bisected in a lift of dimension {monomials}")]
    TooManySets { sets: usize, monomials: usize },
    #[error("no certified bisector found after {restarts} restarts")]
    SearchBudgetExceeded { restarts: usize },
    #[error("round {round}: a cell holds {count} points, above the cap {cap}")]
    BalanceViolated { round: usize, count: usize, cap: usize },
    #[error("factor {factor} vanishes identically on the line")]
    LineInZeroSet { factor: usize },
    #[error("factor {factor} vanishes identically on the 2-flat")]
    FlatInZeroSet { factor: usize },
    #[error("{observed} cells observed, above the bound {bound}")]
    CrossingBoundViolated { observed: usize, bound: usize },
    #[error("partition dump, line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Smallest lift degree whose monomials (constant included) number at least
/// `2^(round-1) + 1`, enough freedom to bisect every cell of the earlier rounds.
pub fn minimal_lift_degree(round: usize) -> u32 {
    let need = (1usize << (round - 1)) + 1;
    (1..).find(|&k| lift_dimension(k) + 1 >= need).expect("unbounded")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionParams {
    /// Number of bisection rounds `J`.
    pub rounds: usize,
    /// Balance slack δ in `[0, 1)`.
    pub delta: ExactScalar,
    /// Lift degree per round.
    pub schedule: Vec<u32>,
    pub seed: u64,
    pub budget: SearchBudget,
}

impl PartitionParams {
    /// `rounds` rounds with the minimal lift degree in each.
    pub fn new(rounds: usize, delta: ExactScalar) -> Self {
        Self {
            rounds,
            delta,
            schedule: (1..=rounds).map(minimal_lift_degree).collect(),
            seed: 0,
            budget: SearchBudget::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), PartitionError> {
        if self.delta.is_negative() || self.delta >= ExactScalar::one() {
            return Err(PartitionError::InvalidParams(format!("delta {} is outside [0, 1)", self.delta)));
        }
        if self.schedule.len() != self.rounds {
            return Err(PartitionError::InvalidParams(format!(
                "schedule has {} entries for {} rounds",
                self.schedule.len(),
                self.rounds
            )));
        }
        for (i, &k) in self.schedule.iter().enumerate() {
            if k == 0 || k < minimal_lift_degree(i + 1) {
                return Err(PartitionError::InvalidParams(format!(
                    "round {} lift degree {k} is too small to bisect {} cells",
                    i + 1,
                    1usize << i
                )));
            }
        }
        Ok(())
    }

    /// `⌈n · 2^-j · (1+δ)^j⌉`, the largest cell allowed after round `j`.
    pub fn cell_cap(&self, n: usize, round: usize) -> usize {
        let grow = num_traits::pow(ExactScalar::one() + &self.delta, round);
        let cap = BigRational::from_integer(BigInt::from(n)) * grow / BigInt::from(2).pow(round as u32);
        usize::try_from(cap.ceil().to_integer()).expect("cap fits")
    }
}

/// Integer form of a polynomial for fast exact signs: with `x = X / q`,
/// `sign p(x) = sign Σ c_α X^α q^(d - |α|)`.
#[derive(Clone, Debug)]
struct IntegerForm {
    degree: u32,
    terms: Vec<(Exponent, BigInt)>,
}

impl IntegerForm {
    fn new(p: &MultiPoly4) -> Self {
        let primitive = p.primitive();
        Self {
            degree: p.degree().max(0) as u32,
            terms: primitive.terms().map(|(e, c)| (*e, c.to_integer())).collect(),
        }
    }

    fn sign_at(&self, x: &Vec4) -> i8 {
        let q = x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = x.iter().map(|c| c.numer() * (&q / c.denom())).collect();
        let d = self.degree as usize;
        let powers = |b: &BigInt| {
            let mut row = vec![BigInt::one()];
            for i in 1..=d {
                let next = &row[i - 1] * b;
                row.push(next);
            }
            row
        };
        let xp: Vec<Vec<BigInt>> = ints.iter().map(powers).collect();
        let qp = powers(&q);
        let mut v = BigInt::zero();
        for (e, c) in &self.terms {
            let deg: u32 = e.iter().sum();
            let mut t = c * &qp[(self.degree - deg) as usize];
            for i in 0..4 {
                if e[i] > 0 {
                    t *= &xp[i][e[i] as usize];
                }
            }
            v += t;
        }
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// Ordered factors `P = f₁ ⋯ f_J` with total degree `D = Σ deg fⱼ`.
#[derive(Clone, Debug)]
pub struct PartitionPolynomial {
    factors: Vec<MultiPoly4>,
    delta: ExactScalar,
    forms: Vec<IntegerForm>,
}

impl PartialEq for PartitionPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors && self.delta == other.delta
    }
}

impl Eq for PartitionPolynomial {}

impl PartitionPolynomial {
    pub fn from_factors(factors: Vec<MultiPoly4>) -> Result<Self, PartitionError> {
        Self::with_delta(factors, ExactScalar::zero())
    }

    pub fn with_delta(factors: Vec<MultiPoly4>, delta: ExactScalar) -> Result<Self, PartitionError> {
        if let Some(i) = factors.iter().position(MultiPoly4::is_zero) {
            return Err(PartitionError::InvalidParams(format!("factor {i} is the zero polynomial")));
        }
        let forms = factors.iter().map(IntegerForm::new).collect();
        Ok(Self { factors, delta, forms })
    }

    pub fn factors(&self) -> &[MultiPoly4] {
        &self.factors
    }

    /// `J`
    pub fn rounds(&self) -> usize {
        self.factors.len()
    }

    /// Balance slack the partition was built with.
    pub fn delta(&self) -> &ExactScalar {
        &self.delta
    }

    /// `D`
    pub fn total_degree(&self) -> usize {
        self.factors.iter().map(|f| f.degree().max(0) as usize).sum()
    }

    /// Text dump: `J`, `delta`, `D`, then each factor as `factor i nterms`
    /// followed by one `coefficient e1 e2 e3 e4` line per term.
    pub fn dump(&self) -> String {
        let mut out = format!("J {}\ndelta {}\nD {}\n", self.rounds(), self.delta, self.total_degree());
        for (i, f) in self.factors.iter().enumerate() {
            out.push_str(&format!("factor {i} {}\n", f.num_terms()));
            for (e, c) in f.terms() {
                out.push_str(&format!("{c} {} {} {} {}\n", e[0], e[1], e[2], e[3]));
            }
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self, PartitionError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (n, j) = keyed(&mut lines, "J")?;
        let j: usize = j.parse().map_err(|_| parse_err(n, "J is not a count"))?;
        let (n, delta) = keyed(&mut lines, "delta")?;
        let delta = parse_rational(delta).ok_or_else(|| parse_err(n, "delta is not a rational"))?;
        let (dn, d) = keyed(&mut lines, "D")?;
        let d: usize = d.parse().map_err(|_| parse_err(dn, "D is not a count"))?;
        let mut factors = Vec::with_capacity(j);
        for i in 0..j {
            let (n, rest) = keyed(&mut lines, "factor")?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 2 || fields[0] != i.to_string() {
                return Err(parse_err(n, &format!("expected factor {i} header")));
            }
            let nterms: usize = fields[1].parse().map_err(|_| parse_err(n, "term count is not a count"))?;
            let mut terms = Vec::with_capacity(nterms);
            for _ in 0..nterms {
                let (n, l) = lines.next().ok_or_else(|| parse_err(n, "missing term"))?;
                let fields: Vec<&str> = l.split_whitespace().collect();
                if fields.len() != 5 {
                    return Err(parse_err(n, "term needs a coefficient and four exponents"));
                }
                let c = parse_rational(fields[0]).ok_or_else(|| parse_err(n, "bad coefficient"))?;
                let mut e = [0u32; 4];
                for (slot, f) in e.iter_mut().zip(&fields[1..]) {
                    *slot = f.parse().map_err(|_| parse_err(n, "bad exponent"))?;
                }
                terms.push((e, c));
            }
            factors.push(MultiPoly4::from_terms(terms));
        }
        if let Some((n, _)) = lines.next() {
            return Err(parse_err(n, "trailing content"));
        }
        let part = Self::with_delta(factors, delta).map_err(|e| parse_err(0, &e.to_string()))?;
        if part.total_degree() != d {
            return Err(parse_err(dn, &format!("D = {d} but factors have total degree {}", part.total_degree())));
        }
        Ok(part)
    }

    fn sign_vector(&self, x: &Vec4, upto: usize) -> SignVector {
        SignVector(self.forms[..upto].iter().map(|f| f.sign_at(x)).collect())
    }
}

fn parse_err(line: usize, message: &str) -> PartitionError {
    PartitionError::Parse { line, message: message.to_string() }
}

/// Next nonblank line, which must read `key value...`; returns the value part.
fn keyed<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
) -> Result<(usize, &'a str), PartitionError> {
    let (n, l) = lines.next().ok_or_else(|| parse_err(0, &format!("missing {key}")))?;
    let value = l
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| parse_err(n, &format!("expected {key}")))?;
    Ok((n, value.trim()))
}

/// Signs of the factors at a point. Any zero entry puts the point on `Z(P)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub Vec<i8>);

impl SignVector {
    pub fn on_zero_set(&self) -> bool {
        self.0.contains(&0)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(match s {
                1 => "+",
                -1 => "-",
                _ => "0",
            })?;
        }
        Ok(())
    }
}

/// Exact sign vector of `x`.
pub fn cell_id(x: &Vec4, part: &PartitionPolynomial) -> SignVector {
    part.sign_vector(x, part.rounds())
}

/// Points per open cell, plus the number on the zero set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellCensus {
    pub cells: BTreeMap<SignVector, usize>,
    pub on_zero_set: usize,
}

impl CellCensus {
    pub fn max_cell(&self) -> usize {
        self.cells.values().copied().max().unwrap_or(0)
    }
}

/// Cell census using only the first `rounds` factors.
pub fn census(points: &[Vec4], part: &PartitionPolynomial, rounds: usize) -> CellCensus {
    let mut out = CellCensus::default();
    for p in points {
        let sv = part.sign_vector(p, rounds);
        if sv.on_zero_set() {
            out.on_zero_set += 1;
        } else {
            *out.cells.entry(sv).or_default() += 1;
        }
    }
    out
}

/// One ham-sandwich round: a nonconstant polynomial of degree ≤ `k` leaving
/// at most `⌈|X|(1+δ)/2⌉` points of each set `X` strictly on either side.
pub fn ham_sandwich_bisect(sets: &[Vec<Vec4>], k: u32, delta: &ExactScalar) -> Result<MultiPoly4, PartitionError> {
    let caps: Vec<usize> = sets.iter().map(|s| half_cap(s.len(), delta)).collect();
    lift::bisect_with_caps(sets, k, &caps, 0, SearchBudget::default())
}

fn half_cap(n: usize, delta: &ExactScalar) -> usize {
    let v = BigRational::from_integer(BigInt::from(n)) * (ExactScalar::one() + delta) / BigInt::from(2);
    usize::try_from(v.ceil().to_integer()).expect("cap fits")
}

/// Builds `J` factors so that after round `j` every open cell holds at most
/// [`PartitionParams::cell_cap`] points; the final partition is re-checked
/// round by round with exact cell assignment.
pub fn build_partition(points: &[Vec4], params: &PartitionParams) -> Result<PartitionPolynomial, PartitionError> {
    params.validate()?;
    let n = points.len();
    let mut factors: Vec<MultiPoly4> = Vec::with_capacity(params.rounds);
    // current sign vector of every point still off the zero set
    let mut active: Vec<(usize, Vec<i8>)> = (0..n).map(|i| (i, Vec::new())).collect();
    for round in 1..=params.rounds {
        let mut groups: BTreeMap<Vec<i8>, Vec<usize>> = BTreeMap::new();
        for (i, sv) in &active {
            groups.entry(sv.clone()).or_default().push(*i);
        }
        let limit = params.cell_cap(n, round);
        // cells already within this round's cap impose no constraint
        let sets: Vec<Vec<Vec4>> = groups
            .values()
            .filter(|ix| ix.len() > limit)
            .map(|ix| ix.iter().map(|&i| points[i].clone()).collect())
            .collect();
        let caps = vec![limit; sets.len()];
        let seed = params.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(round as u64);
        let k = params.schedule[round - 1];
        let factor = lift::bisect_with_caps(&sets, k, &caps, seed, params.budget)?;
        let form = IntegerForm::new(&factor);
        active = active
            .into_iter()
            .filter_map(|(i, mut sv)| {
                let s = form.sign_at(&points[i]);
                sv.push(s);
                (s != 0).then_some((i, sv))
            })
            .collect();
        factors.push(factor);
    }
    let part = PartitionPolynomial::with_delta(factors, params.delta.clone())?;
    for round in 1..=params.rounds {
        let cap = params.cell_cap(n, round);
        let count = census(points, &part, round).max_cell();
        if count > cap {
            return Err(PartitionError::BalanceViolated { round, count, cap });
        }
    }
    Ok(part)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exact::{int, ratio, vec4};

    pub(crate) fn x1_minus(c: ExactScalar) -> MultiPoly4 {
        &MultiPoly4::var(0) - &MultiPoly4::constant(c)
    }

    /// The three-round partition of `{(i,0,0,0) : i = 1..8}` by hand.
    pub(crate) fn collinear_partition() -> PartitionPolynomial {
        let f = |cs: &[(i64, i64)]| cs.iter().fold(MultiPoly4::constant(int(1)), |acc, &(a, b)| &acc * &x1_minus(ratio(a, b)));
        PartitionPolynomial::from_factors(vec![
            f(&[(9, 2)]),
            f(&[(5, 2), (13, 2)]),
            f(&[(3, 2), (7, 2), (11, 2), (15, 2)]),
        ])
        .unwrap()
    }

    fn axis_points() -> Vec<Vec4> {
        (1..=8).map(|i| vec4([i, 0, 0, 0])).collect()
    }

    #[test]
    fn cell_id_examples() {
        let p = PartitionPolynomial::from_factors(vec![MultiPoly4::var(0)]).unwrap();
        assert_eq!(cell_id(&vec4([2, 0, 0, 0]), &p), SignVector(vec![1]));
        let on = cell_id(&vec4([0, 3, 0, 0]), &p);
        assert_eq!(on, SignVector(vec![0]));
        assert!(on.on_zero_set());
        let q = PartitionPolynomial::from_factors(vec![
            MultiPoly4::var(0),
            &MultiPoly4::var(1) - &MultiPoly4::constant(int(1)),
        ])
        .unwrap();
        assert_eq!(cell_id(&vec4([-1, 0, 0, 0]), &q), SignVector(vec![-1, -1]));
    }

    #[test]
    fn integer_form_agrees_with_evaluation() {
        let p = &(&MultiPoly4::var(0) * &MultiPoly4::var(3)) - &MultiPoly4::constant(ratio(1, 3));
        let form = IntegerForm::new(&p);
        for x in [
            [ratio(1, 2), int(0), int(0), ratio(2, 3)],
            [ratio(1, 2), int(0), int(0), ratio(1, 2)],
            [int(-1), int(5), int(0), ratio(-1, 3)],
        ] {
            assert_eq!(form.sign_at(&x), p.sign_at(&x));
        }
    }

    #[test]
    fn collinear_construction_is_balanced() {
        let part = collinear_partition();
        assert_eq!(part.total_degree(), 7);
        let c = census(&axis_points(), &part, 3);
        assert_eq!(c.cells.len(), 8);
        assert!(c.cells.values().all(|&n| n == 1));
        assert_eq!(c.on_zero_set, 0);
    }

    #[test]
    fn zero_rounds_is_one_cell() {
        let part = build_partition(&axis_points(), &PartitionParams::new(0, int(0))).unwrap();
        assert_eq!(part.rounds(), 0);
        let c = census(&axis_points(), &part, 0);
        assert_eq!(c.cells.len(), 1);
        assert_eq!(c.max_cell(), 8);
    }

    #[test]
    fn bisects_collinear_points() {
        let h = ham_sandwich_bisect(&[axis_points()], 1, &int(0)).unwrap();
        let signs: Vec<i8> = axis_points().iter().map(|p| h.sign_at(p)).collect();
        assert!(signs.iter().filter(|&&s| s > 0).count() <= 4);
        assert!(signs.iter().filter(|&&s| s < 0).count() <= 4);
        assert!(signs.iter().any(|&s| s != 0));
    }

    #[test]
    fn bisects_two_points() {
        let pts = vec![vec4([1, 2, 3, 4]), vec4([-3, 0, 7, 1])];
        let h = ham_sandwich_bisect(&[pts.clone()], 1, &int(0)).unwrap();
        let mut signs: Vec<i8> = pts.iter().map(|p| h.sign_at(p)).collect();
        signs.sort();
        assert_ne!(signs, vec![-1, -1]);
        assert_ne!(signs, vec![1, 1]);
    }

    #[test]
    fn bisects_two_skew_collinear_sets() {
        let a: Vec<Vec4> = (0..4).map(|i| vec4([i, 0, 0, 0])).collect();
        let b: Vec<Vec4> = (0..4).map(|i| vec4([0, i, 1, 0])).collect();
        let h = ham_sandwich_bisect(&[a.clone(), b.clone()], 2, &int(0)).unwrap();
        for set in [a, b] {
            let signs: Vec<i8> = set.iter().map(|p| h.sign_at(p)).collect();
            assert!(signs.iter().filter(|&&s| s > 0).count() <= 2);
            assert!(signs.iter().filter(|&&s| s < 0).count() <= 2);
        }
    }

    #[test]
    fn caps_and_schedule() {
        let params = PartitionParams::new(8, ratio(1, 10));
        assert_eq!(params.schedule, vec![1, 1, 1, 2, 3, 3, 4, 6]);
        assert_eq!(params.cell_cap(1024, 8), 9);
        assert_eq!(params.cell_cap(8, 3), 2);
        assert_eq!(PartitionParams::new(3, int(0)).cell_cap(8, 3), 1);
        let mut bad = params.clone();
        bad.schedule[7] = 5;
        assert!(bad.validate().is_err());
        assert!(PartitionParams::new(1, int(1)).validate().is_err());
    }

    #[test]
    fn small_random_partition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Vec4> = (0..64).map(|_| vec4(std::array::from_fn(|_| rng.random_range(-100..=100)))).collect();
        let params = PartitionParams::new(4, ratio(1, 10));
        let part = build_partition(&pts, &params).unwrap();
        assert_eq!(part.rounds(), 4);
        assert!(census(&pts, &part, 4).max_cell() <= params.cell_cap(64, 4));
    }

    #[test]
    fn dump_round_trip() {
        let part = collinear_partition();
        let text = part.dump();
        assert!(text.starts_with("J 3\ndelta 0\nD 7\nfactor 0 2\n"));
        assert_eq!(PartitionPolynomial::parse_dump(&text).unwrap(), part);
        let broken = text.replace("D 7", "D 6");
        assert!(matches!(PartitionPolynomial::parse_dump(&broken), Err(PartitionError::Parse { .. })));
    }
}
