//! Veronese lifting and the lifted-space bisection search.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PartitionError;
use crate::exact::{int, Exponent, ExactScalar, MultiPoly4, Vec4};

/// Exponents of every monomial of total degree `1..=k` in four variables,
/// ordered by degree and then lexicographically (x₁ first).
pub fn monomial_exponents(k: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for d in 1..=k {
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                for c in (0..=d - a - b).rev() {
                    out.push([a, b, c, d - a - b - c]);
                }
            }
        }
    }
    out
}

/// `C(4 + k, 4) - 1`, the dimension of the degree-`k` lift.
pub fn lift_dimension(k: u32) -> usize {
    let k = k as usize;
    (k + 1) * (k + 2) * (k + 3) * (k + 4) / 24 - 1
}

/// All monomials of degree `1..=k` evaluated at `x`, in [`monomial_exponents`] order.
pub fn veronese_lift(x: &Vec4, k: u32) -> Vec<ExactScalar> {
    monomial_exponents(k)
        .iter()
        .map(|e| {
            e.iter()
                .zip(x)
                .fold(ExactScalar::one(), |acc, (&p, xi)| acc * num_traits::pow(xi.clone(), p as usize))
        })
        .collect()
}

/// Points rescaled to `y = (x - center) / scale` with `|y| ≤ 1`, kept in two
/// forms: floats for the search, and integer monomial vectors
/// `Y^α · q^(k - |α|)` (where `y = Y / q`) for exact sign checks.
struct Workspace {
    exponents: Vec<Exponent>,
    center: Vec4,
    scale: ExactScalar,
    float_lift: Vec<DMatrix<f64>>,
    int_lift: Vec<Vec<Vec<BigInt>>>,
}

fn dyadic(x: f64, bits: i32) -> ExactScalar {
    let scaled = (x * f64::from(bits).exp2()).round();
    BigRational::new(BigInt::from_f64(scaled).unwrap_or_default(), BigInt::one() << bits as usize)
}

impl Workspace {
    fn new(sets: &[Vec<Vec4>], k: u32) -> Self {
        // constant monomial first
        let mut exponents = vec![[0; 4]];
        exponents.extend(monomial_exponents(k));
        let all: Vec<&Vec4> = sets.iter().flatten().collect();
        let n = all.len().max(1) as f64;
        let center: Vec4 = std::array::from_fn(|i| {
            let mean = all.iter().map(|p| p[i].to_f64().unwrap_or(0.0)).sum::<f64>() / n;
            dyadic(mean, 8)
        });
        let spread = all
            .iter()
            .flat_map(|p| p.iter().zip(&center).map(|(x, c)| (x - c).abs()))
            .fold(ExactScalar::zero(), |a, b| if b > a { b } else { a });
        let mut scale = ExactScalar::one();
        while scale < spread {
            scale *= int(2);
        }
        let mut float_lift = Vec::with_capacity(sets.len());
        let mut int_lift = Vec::with_capacity(sets.len());
        for set in sets {
            let ys: Vec<Vec4> =
                set.iter().map(|p| std::array::from_fn(|i| (&p[i] - &center[i]) / &scale)).collect();
            float_lift.push(DMatrix::from_fn(ys.len(), exponents.len(), |r, c| {
                let y: [f64; 4] = std::array::from_fn(|i| ys[r][i].to_f64().unwrap_or(0.0));
                exponents[c].iter().zip(y).map(|(&e, yi)| yi.powi(e as i32)).product()
            }));
            int_lift.push(ys.iter().map(|y| integer_monomials(y, k, &exponents)).collect());
        }
        Self { exponents, center, scale, float_lift, int_lift }
    }

    /// Exact sign of the candidate with integer coefficients `w` at point `j` of set `s`.
    fn exact_sign(&self, w: &[BigInt], s: usize, j: usize) -> i8 {
        let v: BigInt = w.iter().zip(&self.int_lift[s][j]).filter(|(c, _)| !c.is_zero()).map(|(c, m)| c * m).sum();
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }

    /// The candidate as a polynomial in the original coordinates.
    fn to_polynomial(&self, w: &[BigInt]) -> MultiPoly4 {
        let inv = self.scale.recip();
        let images: [MultiPoly4; 4] = std::array::from_fn(|i| {
            MultiPoly4::from_terms([(unit(i), inv.clone()), ([0; 4], -(&self.center[i] * &inv))])
        });
        let h = MultiPoly4::from_terms(
            self.exponents.iter().zip(w).map(|(e, c)| (*e, BigRational::from_integer(c.clone()))),
        );
        h.compose(&images).primitive()
    }
}

fn unit(i: usize) -> Exponent {
    let mut e = [0; 4];
    e[i] = 1;
    e
}

fn integer_monomials(y: &Vec4, k: u32, exponents: &[Exponent]) -> Vec<BigInt> {
    let q = y.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = y.iter().map(|c| c.numer() * (&q / c.denom())).collect();
    let powers = |base: &BigInt| -> Vec<BigInt> {
        let mut row = vec![BigInt::one()];
        for d in 1..=k as usize {
            let next = &row[d - 1] * base;
            row.push(next);
        }
        row
    };
    let ypow: Vec<Vec<BigInt>> = ints.iter().map(powers).collect();
    let qpow = powers(&q);
    exponents
        .iter()
        .map(|e| {
            let deg: u32 = e.iter().sum();
            let mut m = qpow[(k - deg) as usize].clone();
            for i in 0..4 {
                if e[i] > 0 {
                    m *= &ypow[i][e[i] as usize];
                }
            }
            m
        })
        .collect()
}

/// Search effort for one bisection call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { restarts: 200, iterations: 60 }
    }
}

/// Finds a nonconstant polynomial of degree ≤ `k` with at most `caps[i]`
/// points of `sets[i]` strictly on each side of its zero set.
///
/// Candidates come from a float search that repeatedly projects the
/// coefficient vector onto the subspace vanishing at (or balancing) the
/// current per-set medians. Every candidate is rounded to integer
/// coefficients and checked exactly; only a certified candidate is returned.
pub(crate) fn bisect_with_caps(
    sets: &[Vec<Vec4>],
    k: u32,
    caps: &[usize],
    seed: u64,
    budget: SearchBudget,
) -> Result<MultiPoly4, PartitionError> {
    if k == 0 {
        return Err(PartitionError::InvalidParams("lift degree must be at least 1".into()));
    }
    let m = lift_dimension(k);
    if sets.len() > m {
        return Err(PartitionError::TooManySets { sets: sets.len(), monomials: m });
    }
    let ws = Workspace::new(sets, k);
    let dim = ws.exponents.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let soft_iterations = budget.iterations / 2;
    for _ in 0..budget.restarts {
        let mut w = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        // the constant alone cannot split anything
        w[0] = 0.0;
        for it in 0..budget.iterations {
            let values: Vec<DVector<f64>> = ws.float_lift.iter().map(|l| l * &w).collect();
            if float_balanced(&values, caps) {
                let rounded = round_coefficients(&w);
                if certify(&ws, &rounded, caps) {
                    return Ok(ws.to_polynomial(&rounded));
                }
            }
            let step = if it < soft_iterations {
                soft_step(&ws, &values, f64::from(1u32 << (it / 5).min(20)))
            } else {
                median_step(&ws, &values, &w)
            };
            let Some(step) = step else { break };
            w -= step;
            let norm = w.norm();
            if norm < 1e-9 || !norm.is_finite() {
                break;
            }
            w /= norm;
        }
    }
    Err(PartitionError::SearchBudgetExceeded { restarts: budget.restarts })
}

/// Gauss-Newton step on the smoothed imbalance `Σ tanh(β·h(x)/σ)` of each
/// set, where `σ` is the set's RMS value.
fn soft_step(ws: &Workspace, values: &[DVector<f64>], beta: f64) -> Option<DVector<f64>> {
    let dim = ws.exponents.len();
    let mut jac = DMatrix::<f64>::zeros(values.len(), dim);
    let mut res = DVector::<f64>::zeros(values.len());
    for (i, (lift, v)) in ws.float_lift.iter().zip(values).enumerate() {
        let n = v.len();
        if n == 0 {
            continue;
        }
        let sigma = (v.norm_squared() / n as f64).sqrt().max(1e-300);
        let mut r = 0.0;
        for (j, &x) in v.iter().enumerate() {
            let t = (beta * x / sigma).tanh();
            r += t;
            let g = beta * (1.0 - t * t) / sigma;
            for c in 0..dim {
                jac[(i, c)] += g * lift[(j, c)];
            }
        }
        res[i] = r;
    }
    let pinv = jac.pseudo_inverse(1e-12).ok()?;
    Some(pinv * res)
}

fn float_balanced(values: &[DVector<f64>], caps: &[usize]) -> bool {
    values.iter().zip(caps).all(|(v, &cap)| {
        let tol = 1e-9 * v.amax().max(1e-300);
        let pos = v.iter().filter(|&&x| x > -tol).count();
        let neg = v.iter().filter(|&&x| x < tol).count();
        pos <= cap && neg <= cap
    })
}

/// Projection onto the coefficients that vanish at every set's current
/// median: the median point for odd sizes, the sum of the two middle points
/// for even sizes.
fn median_step(ws: &Workspace, values: &[DVector<f64>], w: &DVector<f64>) -> Option<DVector<f64>> {
    let rows = median_constraints(ws, values);
    if rows.nrows() == 0 {
        return None;
    }
    let pinv = rows.clone().pseudo_inverse(1e-10).ok()?;
    Some(pinv * (rows * w))
}

fn median_constraints(ws: &Workspace, values: &[DVector<f64>]) -> DMatrix<f64> {
    let dim = ws.exponents.len();
    let mut rows = Vec::new();
    for (lift, v) in ws.float_lift.iter().zip(values) {
        let n = v.len();
        if n == 0 {
            continue;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let row = if n % 2 == 1 {
            lift.row(order[n / 2]).into_owned()
        } else {
            lift.row(order[n / 2 - 1]) + lift.row(order[n / 2])
        };
        rows.push(row);
    }
    if rows.is_empty() {
        return DMatrix::zeros(0, dim);
    }
    DMatrix::from_rows(&rows)
}

fn round_coefficients(w: &DVector<f64>) -> Vec<BigInt> {
    let max = w.amax();
    let unit = if max > 0.0 { f64::from(1u32 << 30) / max } else { 0.0 };
    w.iter().map(|c| BigInt::from_f64((c * unit).round()).unwrap_or_default()).collect()
}

fn certify(ws: &Workspace, w: &[BigInt], caps: &[usize]) -> bool {
    if w[1..].iter().all(Zero::is_zero) {
        return false;
    }
    let mut any_off = false;
    for (s, &cap) in caps.iter().enumerate() {
        let (mut pos, mut neg) = (0, 0);
        for j in 0..ws.int_lift[s].len() {
            match ws.exact_sign(w, s, j) {
                1 => pos += 1,
                -1 => neg += 1,
                _ => continue,
            }
            any_off = true;
            if pos > cap || neg > cap {
                return false;
            }
        }
    }
    // a factor vanishing on every point carries no information
    any_off || ws.int_lift.iter().all(Vec::is_empty)
}
