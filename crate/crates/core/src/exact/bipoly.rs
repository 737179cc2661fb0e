use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::ring::Ring;
use super::sturm::{sturm_root_count, Endpoint};
use super::{int, ExactError, ExactScalar, UniPoly};

/// Sparse polynomial in two variables `(x, y)`; on a 2-flat these are the
/// parameters `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<[u32; 2], ExactScalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    X,
    Y,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::from_terms([([0, 0], c)])
    }

    pub fn x() -> Self {
        Self::from_terms([([1, 0], ExactScalar::one())])
    }

    pub fn y() -> Self {
        Self::from_terms([([0, 1], ExactScalar::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; 2], ExactScalar)>) -> Self {
        let mut map: BTreeMap<[u32; 2], ExactScalar> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(ExactScalar::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { terms: map }
    }

    /// Integer coefficients; convenient for tests and fixtures.
    pub fn from_int_terms(terms: &[([u32; 2], i64)]) -> Self {
        Self::from_terms(terms.iter().map(|(e, c)| (*e, int(*c))))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 2], &ExactScalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.terms.keys().map(|e| (e[0] + e[1]) as i32).max().unwrap_or(-1)
    }

    pub fn degree_in(&self, var: Variable) -> i32 {
        let k = var as usize;
        self.terms.keys().map(|e| e[k] as i32).max().unwrap_or(-1)
    }

    pub fn eval(&self, x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
        self.compose(&[x.clone(), y.clone()])
    }

    pub fn compose<R: Ring>(&self, images: &[R; 2]) -> R {
        let mut acc = R::ring_zero();
        for (e, c) in &self.terms {
            let mut term = R::from_scalar(c.clone());
            for (img, &k) in images.iter().zip(e) {
                for _ in 0..k {
                    term = term.ring_mul(img);
                }
            }
            acc = acc.ring_add(&term);
        }
        acc
    }

    /// Coefficients as a polynomial in `var`, each a univariate polynomial in
    /// the other variable. Index = power of `var`.
    pub fn coefficients_in(&self, var: Variable) -> Vec<UniPoly> {
        let (main, other) = match var {
            Variable::X => (0, 1),
            Variable::Y => (1, 0),
        };
        let deg = self.degree_in(var);
        let mut rows: Vec<Vec<ExactScalar>> = vec![Vec::new(); (deg + 1).max(0) as usize];
        for (e, c) in &self.terms {
            let row = &mut rows[e[main] as usize];
            let k = e[other] as usize;
            if row.len() <= k {
                row.resize(k + 1, ExactScalar::zero());
            }
            row[k] = c.clone();
        }
        rows.into_iter().map(UniPoly::from_coeffs).collect()
    }

    /// `q(x + λ·y, y)`: a bijective linear change of coordinates.
    pub fn shear(&self, lambda: &ExactScalar) -> Self {
        let x_image = &Self::x() + &Self::y().scale(lambda);
        self.compose(&[x_image, Self::y()])
    }

    /// Top-degree homogeneous part evaluated at `(λ, 1)`; this is the
    /// coefficient of `y^deg` after [`BiPoly::shear`] by λ.
    pub fn leading_form_at(&self, lambda: &ExactScalar) -> ExactScalar {
        let d = self.degree();
        self.terms
            .iter()
            .filter(|(e, _)| (e[0] + e[1]) as i32 == d)
            .map(|(e, c)| c * num_traits::pow(lambda.clone(), e[0] as usize))
            .sum()
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, v)| (*e, v * c)))
    }
}

impl Ring for BiPoly {
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
        BiPoly::scale(self, c)
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;

    fn add(self, rhs: &BiPoly) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().chain(&rhs.terms).map(|(e, c)| (*e, c.clone())))
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;

    fn neg(self) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;

    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;

    fn mul(self, rhs: &BiPoly) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().flat_map(|(ea, ca)| {
            rhs.terms.iter().map(move |(eb, cb)| ([ea[0] + eb[0], ea[1] + eb[1]], ca * cb))
        }))
    }
}

/// Determinant of a square matrix over Q[t] by fraction-free (Bareiss) elimination.
fn bareiss_det(mut m: Vec<Vec<UniPoly>>) -> UniPoly {
    let n = m.len();
    let mut negate = false;
    let mut prev = UniPoly::constant(ExactScalar::one());
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return UniPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = if n == 0 { UniPoly::constant(ExactScalar::one()) } else { m[n - 1][n - 1].clone() };
    if negate {
        -&det
    } else {
        det
    }
}

/// Sylvester resultant eliminating `var`; a polynomial in the other variable.
///
/// Two polynomials both free of `var` have resultant 1 by convention.
pub fn resultant(p: &BiPoly, q: &BiPoly, var: Variable) -> UniPoly {
    let a = p.coefficients_in(var);
    let b = q.coefficients_in(var);
    let m = a.len().saturating_sub(1);
    let n = b.len().saturating_sub(1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    // columns are powers var^{size-1} .. var^0
    for shift in 0..n {
        let mut row = vec![UniPoly::zero(); size];
        for (k, c) in a.iter().enumerate() {
            row[shift + m - k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![UniPoly::zero(); size];
        for (k, c) in b.iter().enumerate() {
            row[shift + n - k] = c.clone();
        }
        rows.push(row);
    }
    bareiss_det(rows)
}

/// Outcome of the planar Bézout check for a pair of curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutReport {
    pub common_factor: bool,
    /// Distinct real intersection points; `None` when the curves share a factor.
    pub intersection_count: Option<usize>,
    /// `deg q1 · deg q2`.
    pub degree_product: usize,
}

impl BezoutReport {
    pub fn within_bound(&self) -> bool {
        self.intersection_count.is_none_or(|c| c <= self.degree_product)
    }
}

/// Decide whether two plane curves share a component and, if not, count
/// their distinct real intersection points exactly.
///
/// A shear `(x, y) ↦ (x + λy, y)` with nonvanishing leading form makes the
/// `y`-resultant vanish exactly at the projections of the complex
/// intersection points. At most `C(N, 2)` shears project two of the `N`
/// points together, so trying `C(d1·d2, 2) + 1` admissible shears and keeping
/// the one with the most distinct resultant roots yields an injective
/// projection; its real roots are then in bijection with the real points.
pub fn bezout_point_check(q1: &BiPoly, q2: &BiPoly) -> Result<BezoutReport, ExactError> {
    if q1.is_zero() || q2.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let (d1, d2) = (q1.degree() as usize, q2.degree() as usize);
    let degree_product = d1 * d2;
    let common_factor = resultant(q1, q2, Variable::Y).is_zero() || resultant(q1, q2, Variable::X).is_zero();
    if common_factor {
        return Ok(BezoutReport { common_factor, intersection_count: None, degree_product });
    }
    if d1 == 0 || d2 == 0 {
        return Ok(BezoutReport { common_factor, intersection_count: Some(0), degree_product });
    }

    let needed = degree_product * degree_product.saturating_sub(1) / 2 + 1;
    let mut tried = 0;
    let mut best: Option<(usize, usize)> = None; // (distinct complex, distinct real)
    let mut step = 0i64;
    while tried < needed {
        // 0, 1, -1, 2, -2, ...
        let lambda = int(if step % 2 == 1 { step / 2 + 1 } else { -(step / 2) });
        step += 1;
        if q1.leading_form_at(&lambda).is_zero() || q2.leading_form_at(&lambda).is_zero() {
            continue;
        }
        tried += 1;
        let res = resultant(&q1.shear(&lambda), &q2.shear(&lambda), Variable::Y);
        let distinct = res.square_free().degree().max(0) as usize;
        if best.is_none_or(|(b, _)| distinct > b) {
            let real = sturm_root_count(&res, &Endpoint::NegInf, &Endpoint::PosInf)?;
            best = Some((distinct, real));
        }
        if distinct == degree_product {
            break;
        }
    }
    let count = best.map_or(0, |(_, real)| real);
    debug_assert!(count <= degree_product);
    Ok(BezoutReport { common_factor, intersection_count: Some(count), degree_product })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> BiPoly {
        BiPoly::from_int_terms(&[([2, 0], 1), ([0, 2], 1), ([0, 0], -1)])
    }

    #[test]
    fn spec_examples() {
        let diag = BiPoly::from_int_terms(&[([1, 0], 1), ([0, 1], -1)]);
        let r = bezout_point_check(&circle(), &diag).unwrap();
        assert_eq!(r, BezoutReport { common_factor: false, intersection_count: Some(2), degree_product: 2 });

        let x = BiPoly::from_int_terms(&[([1, 0], 1)]);
        let x1 = BiPoly::from_int_terms(&[([1, 0], 1), ([0, 0], -1)]);
        let r = bezout_point_check(&x, &x1).unwrap();
        assert_eq!(r.intersection_count, Some(0));
        assert!(!r.common_factor);

        let xy = BiPoly::from_int_terms(&[([1, 1], 1)]);
        let xy1 = BiPoly::from_int_terms(&[([1, 1], 1), ([1, 0], -1)]);
        let r = bezout_point_check(&xy, &xy1).unwrap();
        assert!(r.common_factor);
        assert_eq!(r.intersection_count, None);
    }

    #[test]
    fn zero_input_is_an_error() {
        assert_eq!(bezout_point_check(&BiPoly::zero(), &circle()), Err(ExactError::ZeroPolynomial));
    }

    #[test]
    fn tangent_and_vertical_configurations() {
        // y = x^2 and y = 0 touch once at the origin
        let parabola = BiPoly::from_int_terms(&[([0, 1], 1), ([2, 0], -1)]);
        let axis = BiPoly::from_int_terms(&[([0, 1], 1)]);
        assert_eq!(bezout_point_check(&parabola, &axis).unwrap().intersection_count, Some(1));
        // two points on a common vertical line: x^2 + y^2 = 1 and x = 0
        let vertical = BiPoly::from_int_terms(&[([1, 0], 1)]);
        assert_eq!(bezout_point_check(&circle(), &vertical).unwrap().intersection_count, Some(2));
        // x = y^2 and x = -y^2 share only the origin, tangent to the fibres
        let a = BiPoly::from_int_terms(&[([1, 0], 1), ([0, 2], -1)]);
        let b = BiPoly::from_int_terms(&[([1, 0], 1), ([0, 2], 1)]);
        assert_eq!(bezout_point_check(&a, &b).unwrap().intersection_count, Some(1));
    }

    #[test]
    fn resultant_of_linear_forms() {
        // x - y and x + y - 2 meet at (1, 1); Res_y is linear in x vanishing at 1
        let p = BiPoly::from_int_terms(&[([1, 0], 1), ([0, 1], -1)]);
        let q = BiPoly::from_int_terms(&[([1, 0], 1), ([0, 1], 1), ([0, 0], -2)]);
        let r = resultant(&p, &q, Variable::Y);
        assert_eq!(r.degree(), 1);
        assert_eq!(r.eval(&int(1)), ExactScalar::zero());
    }

    #[test]
    fn common_factor_in_either_variable() {
        let yx = BiPoly::from_int_terms(&[([1, 1], 1), ([0, 1], 1)]); // y(x+1)
        let y2 = BiPoly::from_int_terms(&[([0, 2], 1), ([0, 1], 3)]); // y(y+3)
        assert!(bezout_point_check(&yx, &y2).unwrap().common_factor);
    }
}
