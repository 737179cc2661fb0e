use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{check_epsilon, BoundError, BoundParams, BoundResult, ConstantsProfile, Enclosure};
use crate::exact::ExactScalar;

/// `S ≫ G₂` is read as `S ≥ SEPARATION·G₂`.
pub const SEPARATION: i64 = 100;

fn q(n: u64) -> ExactScalar {
    BigRational::from_integer(n.into())
}

fn r(a: i64, b: i64) -> ExactScalar {
    BigRational::new(a.into(), b.into())
}

fn pw(x: &ExactScalar, e: &ExactScalar) -> Enclosure {
    Enclosure::pow(x, e)
}

fn ex(x: ExactScalar) -> Enclosure {
    Enclosure::exact(x)
}

fn strict(lhs: &Enclosure, rhs: &Enclosure, lname: &str, rname: &str) -> (bool, String) {
    match lhs.gt(rhs) {
        Some(true) => (true, format!("{lname} = {lhs} > {rname} = {rhs}")),
        Some(false) => (false, format!("{lname} = {lhs} <= {rname} = {rhs}")),
        None => (false, format!("{lname} and {rname} agree to certified precision ({lhs}); strict inequality not established")),
    }
}

/// Exact-valued views of the parameters.
struct Vals {
    l: ExactScalar,
    s: ExactScalar,
    d: ExactScalar,
    eps: ExactScalar,
}

impl Vals {
    fn of(p: &BoundParams) -> Self {
        Self { l: q(p.l), s: q(p.s), d: q(p.d), eps: p.epsilon.clone() }
    }

    /// `3/4 + ε/2`
    fn e34(&self) -> ExactScalar {
        r(3, 4) + &self.eps / q(2)
    }

    /// `1/2 + ε`
    fn e12p(&self) -> ExactScalar {
        r(1, 2) + &self.eps
    }

    /// `1/2 - ε`
    fn e12m(&self) -> ExactScalar {
        r(1, 2) - &self.eps
    }
}

/// `L^{3/4+ε/2}·S + L·S^{1/2+ε}`, flagged by the configured regime.
pub fn eval_main_bound(p: &BoundParams) -> Result<BoundResult, BoundError> {
    p.validate()?;
    let v = Vals::of(p);
    let value = &(&pw(&v.l, &v.e34()) * &ex(v.s.clone())) + &(&ex(v.l.clone()) * &pw(&v.s, &v.e12p()));
    let lower = p.regime.lower_holds(p.l, p.s);
    let upper = p.regime.upper_holds(p.l, p.s);
    let detail = format!(
        "regime {}*L^(1/2) <= S <= L/{}: lower {}, upper {}",
        p.regime.lower,
        p.regime.upper,
        if lower { "holds" } else { "fails" },
        if upper { "holds" } else { "fails" }
    );
    Ok(BoundResult::new(value, lower && upper, detail))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellDecomposition {
    /// Lines per cell, `L/D³`.
    pub l_i: ExactScalar,
    /// Planes per cell, `S/D²`.
    pub s_i: ExactScalar,
    pub cell_count: BigInt,
    /// `D^{-1/4-3ε/2}·L^{3/4+ε/2}·S + D^{-2ε}·L·S^{1/2+ε}`.
    pub summed_cell_bound: Enclosure,
    pub dominated_by_main: bool,
}

pub fn eval_cell_decomposition(p: &BoundParams) -> Result<CellDecomposition, BoundError> {
    let main = eval_main_bound(p)?;
    let v = Vals::of(p);
    let first = &(&pw(&v.d, &(r(-1, 4) - &v.eps * r(3, 2))) * &pw(&v.l, &v.e34())) * &ex(v.s.clone());
    let second = &(&pw(&v.d, &(-&v.eps * q(2))) * &ex(v.l.clone())) * &pw(&v.s, &v.e12p());
    let summed = &first + &second;
    let dominated = summed.le(&main.value) == Some(true);
    debug_assert!(dominated, "negative exponents of D keep the cell sum below the main bound");
    Ok(CellDecomposition {
        l_i: &v.l / (&v.d * &v.d * &v.d),
        s_i: &v.s / (&v.d * &v.d),
        cell_count: num_traits::pow(BigInt::from(p.d), 4),
        summed_cell_bound: summed,
        dominated_by_main: dominated,
    })
}

/// A pruning lemma: the per-surface threshold `A` and the resulting count bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruningBound {
    pub threshold: Enclosure,
    pub bound: BoundResult,
}

/// Rich 2-surfaces: `A = (L/D³)^{1/2+ε}`, needs `A > 2·D·L^{1/2}`, gives
/// `G₂ ≤ 2·D^{3/2+3ε}·L^{1/2-ε}`.
pub fn eval_g2_bound(p: &BoundParams) -> Result<PruningBound, BoundError> {
    p.validate()?;
    let v = Vals::of(p);
    let a = pw(&(&v.l / (&v.d * &v.d * &v.d)), &v.e12p());
    let rhs = &ex(q(2) * &v.d) * &Enclosure::sqrt(&v.l);
    let (ok, detail) = strict(&a, &rhs, "A", "2*D*L^(1/2)");
    let value = &(&ex(q(2)) * &pw(&v.d, &(r(3, 2) + &v.eps * q(3)))) * &pw(&v.l, &v.e12m());
    Ok(PruningBound { threshold: a, bound: BoundResult::new(value, ok, detail) })
}

/// Rich 3-surfaces: `A = (S/D²)^{1/2+ε}`, needs `A > 2·D·S^{1/2}`, gives
/// `G₃ ≤ 2·D^{1+2ε}·S^{1/2-ε}`.
pub fn eval_g3_bound(p: &BoundParams) -> Result<PruningBound, BoundError> {
    p.validate()?;
    let v = Vals::of(p);
    let a = pw(&(&v.s / (&v.d * &v.d)), &v.e12p());
    let rhs = &ex(q(2) * &v.d) * &Enclosure::sqrt(&v.s);
    let (ok, detail) = strict(&a, &rhs, "A", "2*D*S^(1/2)");
    let value = &(&ex(q(2)) * &pw(&v.d, &(q(1) + &v.eps * q(2)))) * &pw(&v.s, &v.e12m());
    Ok(PruningBound { threshold: a, bound: BoundResult::new(value, ok, detail) })
}

/// Incidences on rich 2-surfaces, for planes meeting them in points, in
/// curves, and in whole planes.
pub fn eval_two_surface_cases(p: &BoundParams, c: &ConstantsProfile) -> Result<[BoundResult; 3], BoundError> {
    let g2 = eval_g2_bound(p)?;
    let v = Vals::of(p);
    let lemma = (g2.bound.hypothesis_satisfied, format!("G2 lemma: {}", g2.bound.hypothesis_detail));
    let d52 = pw(&v.d, &(r(5, 2) + &v.eps * q(3)));
    let two = ex(q(2));

    let case1 = &(&(&two * &d52) * &pw(&v.l, &v.e12m())) * &ex(v.s.clone());

    let case2 = &(&(&ex(c.c3()) * &pw(&v.d, &(r(3, 2) + &v.eps * q(3)))) * &ex(v.l.clone())) * &Enclosure::sqrt(&v.s);
    let separated = ex(v.s.clone()).ge(&(&ex(q(SEPARATION as u64)) * &g2.bound.value)) == Some(true);
    let s2e = pw(&v.s, &(&v.eps * q(2)));
    let c1sq = ex(c.c1() * c.c1());
    let small = c1sq.gt(&s2e) == Some(true);
    let detail2 = format!(
        "{}; S >= {SEPARATION}*G2 ({} vs G2 = {}): {}; S^(2eps) = {s2e} < C1^2 = {c1sq}: {}",
        lemma.1, v.s, g2.bound.value, separated, small
    );

    let case3 = &(&two * &d52) * &ex(v.l.clone());
    Ok([
        BoundResult::new(case1, lemma.0, lemma.1.clone()),
        BoundResult::new(case2, lemma.0 && separated && small, detail2),
        BoundResult::new(case3, lemma.0, lemma.1),
    ])
}

/// `(s-1)^{1/t}·(n-t+1)·m^{1-1/t} + (t-1)·m` over enclosures (`s ≥ 1`, `m ≥ 0`).
pub fn kst_formula(m: &Enclosure, n: &Enclosure, s: &Enclosure, t: u64) -> Enclosure {
    let t_q = q(t);
    let inv_t = r(1, t as i64);
    let s1 = s - &Enclosure::int(1);
    let first = &(&s1.powr(&inv_t) * &(n - &ex(&t_q - q(1)))) * &m.powr(&(q(1) - &inv_t));
    &first + &(&ex(t_q - q(1)) * m)
}

/// The Kővári–Sós–Turán upper bound for `z(m, n; s, t)`.
pub fn eval_kst(m: u64, n: u64, s: u64, t: u64) -> Result<BoundResult, BoundError> {
    if m < 1 || n < 1 || s < 1 {
        return Err(BoundError::InvalidParams(format!("need m, n, s >= 1, got m={m}, n={n}, s={s}")));
    }
    if t < 1 || t > n {
        return Err(BoundError::DomainError(format!("need 1 <= t <= n, got t={t}, n={n}")));
    }
    let value = kst_formula(&ex(q(m)), &ex(q(n)), &ex(q(s)), t);
    Ok(BoundResult::unconditional(value))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeSurfaceCases {
    /// Lines not inside a rich 3-surface.
    pub case1: BoundResult,
    /// Lines inside a rich 3-surface.
    pub case2: BoundResult,
    /// `z(L, G₃; L^{1/2+ε}+1, 2)` with `G₃` at its bound.
    pub kst_intermediate: BoundResult,
}

pub fn eval_three_surface_cases(p: &BoundParams, _c: &ConstantsProfile) -> Result<ThreeSurfaceCases, BoundError> {
    let g3 = eval_g3_bound(p)?;
    let v = Vals::of(p);
    let lemma = (g3.bound.hypothesis_satisfied, format!("G3 lemma: {}", g3.bound.hypothesis_detail));
    let two = ex(q(2));
    let case1 = &(&(&two * &pw(&v.d, &(q(2) + &v.eps * q(2)))) * &ex(v.l.clone())) * &pw(&v.s, &v.e12m());
    let case2 = &(&(&(&two * &pw(&v.d, &(q(1) + &v.eps * q(2)))) * &pw(&v.l, &v.e34())) * &ex(v.s.clone()))
        + &(&ex(v.l.clone()) * &pw(&v.s, &v.e12p()));
    let s_param = &pw(&v.l, &v.e12p()) + &Enclosure::int(1);
    let kst = kst_formula(&ex(v.l.clone()), &g3.bound.value, &s_param, 2);
    let n_ok = g3.bound.value.ge(&Enclosure::int(2)) == Some(true);
    let kst_detail = format!("{}; t = 2 <= n = G3 = {}: {}", lemma.1, g3.bound.value, n_ok);
    Ok(ThreeSurfaceCases {
        case1: BoundResult::new(case1, lemma.0, lemma.1.clone()),
        case2: BoundResult::new(case2, lemma.0, lemma.1),
        kst_intermediate: BoundResult::new(kst, lemma.0 && n_ok, kst_detail),
    })
}

/// `c4·n^{3/2+ε}/r²`, flagged unless `2 ≤ r ≤ 2·n^{1/2}`.
pub fn eval_rich_points_bound(
    n: u64,
    r_rich: u64,
    epsilon: &ExactScalar,
    c4: &ExactScalar,
) -> Result<BoundResult, BoundError> {
    check_epsilon(epsilon, true)?;
    if n < 1 || r_rich < 1 || c4 < &ExactScalar::zero() {
        return Err(BoundError::InvalidParams(format!("need n, r >= 1 and C4 >= 0, got n={n}, r={r_rich}, C4={c4}")));
    }
    let value = &(&ex(c4.clone()) * &pw(&q(n), &(r(3, 2) + epsilon))) / &ex(q(r_rich * r_rich));
    let ok = r_rich >= 2 && u128::from(r_rich) * u128::from(r_rich) <= 4 * u128::from(n);
    let detail = format!("2 <= r <= 2*n^(1/2) with r = {r_rich}, n = {n}: {ok}");
    Ok(BoundResult::new(value, ok, detail))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroSetCases {
    /// Lines in `Z(P)` with planes meeting it in points; planes with lines in
    /// points; lines in `Z(P)` with planes meeting it in curves; planes in `Z(P)`.
    pub cases: [BoundResult; 4],
    pub sum: Enclosure,
}

/// The zero-set contributions; `S = 0` is allowed here.
pub fn eval_zero_set_cases(p: &BoundParams, c: &ConstantsProfile) -> Result<ZeroSetCases, BoundError> {
    p.validate_counts(0)?;
    let v = Vals::of(p);
    let case1 = ex(&v.d * &v.l);
    let case2 = ex(&v.d * &v.s);
    let factor = ex((r(3, 8) + &v.eps / q(4)) * c.c4());
    let case3 = &(&factor * &pw(&v.l, &v.e12p())) * &ex(v.s.clone());
    let case4 = &ex(v.l.clone()) * &pw(&v.s, &v.e12p());
    let sum = &(&(&case1 + &case2) + &case3) + &case4;
    let dominant = p.regime.upper_holds(p.l, p.s);
    let detail = format!("L >> S read as S <= L/{}: {dominant}", p.regime.upper);
    Ok(ZeroSetCases {
        cases: [
            BoundResult::unconditional(case1),
            BoundResult::unconditional(case2),
            BoundResult::new(case3, dominant, detail),
            BoundResult::unconditional(case4),
        ],
        sum,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalBound {
    pub total: BoundResult,
    pub main: BoundResult,
    /// `total / main`.
    pub ratio: Enclosure,
    /// Every summand of the total, by name.
    pub summands: Vec<(&'static str, Enclosure)>,
    pub dominance_constant: ExactScalar,
    /// Every summand is at most `dominance_constant · main`.
    pub dominated: bool,
}

/// Cells, the five surface cases and the zero set, added up and compared
/// with the main bound.
pub fn eval_total_and_dominance(
    p: &BoundParams,
    c: &ConstantsProfile,
    dominance_constant: &ExactScalar,
) -> Result<TotalBound, BoundError> {
    let main = eval_main_bound(p)?;
    let cells = eval_cell_decomposition(p)?;
    let two = eval_two_surface_cases(p, c)?;
    let three = eval_three_surface_cases(p, c)?;
    let zero = eval_zero_set_cases(p, c)?;
    let mut parts: Vec<(&'static str, &BoundResult)> = vec![
        ("main", &main),
        ("two_surface_1", &two[0]),
        ("two_surface_2", &two[1]),
        ("two_surface_3", &two[2]),
        ("three_surface_1", &three.case1),
        ("three_surface_2", &three.case2),
    ];
    let names = ["zero_set_1", "zero_set_2", "zero_set_3", "zero_set_4"];
    parts.extend(names.iter().copied().zip(zero.cases.iter()));
    let mut summands = vec![("cells", cells.summed_cell_bound.clone())];
    summands.extend(parts[1..].iter().map(|(n, b)| (*n, b.value.clone())));
    let total = summands.iter().fold(Enclosure::int(0), |acc, (_, v)| &acc + v);
    let failing: Vec<String> = parts
        .iter()
        .filter(|(_, b)| !b.hypothesis_satisfied)
        .map(|(n, b)| format!("{n}: {}", b.hypothesis_detail))
        .collect();
    let detail = if failing.is_empty() { "all component hypotheses hold".to_string() } else { failing.join("; ") };
    let cap = &ex(dominance_constant.clone()) * &main.value;
    let dominated = summands.iter().all(|(_, v)| v.le(&cap) == Some(true));
    let ratio = &total / &main.value;
    Ok(TotalBound {
        total: BoundResult::new(total, failing.is_empty(), detail),
        main,
        ratio,
        summands,
        dominance_constant: dominance_constant.clone(),
        dominated,
    })
}

/// Relative error of `S^{3/2}·(1 + 3G₂/(2S))` against `(S+G₂)^{3/2}`.
pub fn binomial_truncation_error(s: &ExactScalar, g2: &Enclosure) -> Enclosure {
    let s_enc = ex(s.clone());
    let full = (&s_enc + g2).powr(&r(3, 2));
    let truncated = &pw(s, &r(3, 2)) + &(&(&ex(r(3, 2)) * &Enclosure::sqrt(s)) * g2);
    &(&full - &truncated) / &full
}
