//! Affine flats in R⁴ and exact incidence classification.
//!
//! Every flat type has a canonical form: two representations describe the
//! same point set exactly when their canonical forms are structurally equal,
//! so canonical forms double as hash keys for deduplication and bucketing.

pub mod linalg;

use num_traits::Zero;
use thiserror::Error;

use crate::exact::{add4, dot4, is_zero4, scale4, sub4, ExactScalar, Vec4};
use linalg::{null_space, rank, rref};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("line direction is the zero vector")]
    ZeroDirection,
    #[error("2-flat spanning vectors are linearly dependent")]
    DependentSpan,
    #[error("hyperplane normal is the zero vector")]
    ZeroNormal,
    #[error("the two lines are identical")]
    IdenticalLines,
    #[error("the two 2-flats are identical")]
    IdenticalFlats,
}

fn first_nonzero(v: &Vec4) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

/// Affine line `base + t·direction`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line4 {
    base: Vec4,
    direction: Vec4,
}

impl Line4 {
    pub fn new(base: Vec4, direction: Vec4) -> Result<Self, GeometryError> {
        if is_zero4(&direction) {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Self { base, direction })
    }

    pub fn base(&self) -> &Vec4 {
        &self.base
    }

    pub fn direction(&self) -> &Vec4 {
        &self.direction
    }

    pub fn point_at(&self, t: &ExactScalar) -> Vec4 {
        add4(&self.base, &scale4(&self.direction, t))
    }

    /// Direction scaled to a leading 1; base has a zero in that coordinate.
    pub fn canonical(&self) -> Line4 {
        let pivot = first_nonzero(&self.direction).expect("nonzero direction");
        let direction = scale4(&self.direction, &self.direction[pivot].recip());
        let base = sub4(&self.base, &scale4(&direction, &self.base[pivot]));
        Line4 { base, direction }
    }

    pub fn same_as(&self, other: &Line4) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn contains_point(&self, p: &Vec4) -> bool {
        rank(&[self.direction.to_vec(), sub4(p, &self.base).to_vec()]) == 1
    }
}

/// Affine 2-flat `base + a·u + b·v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat2 {
    base: Vec4,
    u: Vec4,
    v: Vec4,
}

impl Flat2 {
    pub fn new(base: Vec4, u: Vec4, v: Vec4) -> Result<Self, GeometryError> {
        if rank(&[u.to_vec(), v.to_vec()]) < 2 {
            return Err(GeometryError::DependentSpan);
        }
        Ok(Self { base, u, v })
    }

    pub fn base(&self) -> &Vec4 {
        &self.base
    }

    pub fn u(&self) -> &Vec4 {
        &self.u
    }

    pub fn v(&self) -> &Vec4 {
        &self.v
    }

    pub fn point_at(&self, a: &ExactScalar, b: &ExactScalar) -> Vec4 {
        add4(&self.base, &add4(&scale4(&self.u, a), &scale4(&self.v, b)))
    }

    /// Span in reduced row echelon form; base zeroed at both pivot columns.
    pub fn canonical(&self) -> Flat2 {
        let mut rows = vec![self.u.to_vec(), self.v.to_vec()];
        let pivots = rref(&mut rows);
        let to4 = |r: &Vec<ExactScalar>| -> Vec4 { std::array::from_fn(|i| r[i].clone()) };
        let (u, v) = (to4(&rows[0]), to4(&rows[1]));
        let mut base = self.base.clone();
        for (row, &p) in [&u, &v].into_iter().zip(&pivots) {
            let c = base[p].clone();
            base = sub4(&base, &scale4(row, &c));
        }
        Flat2 { base, u, v }
    }

    pub fn same_as(&self, other: &Flat2) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn contains_point(&self, p: &Vec4) -> bool {
        rank(&[self.u.to_vec(), self.v.to_vec(), sub4(p, &self.base).to_vec()]) == 2
    }

    /// Whether the direction `d` is parallel to this flat.
    pub fn contains_direction(&self, d: &Vec4) -> bool {
        rank(&[self.u.to_vec(), self.v.to_vec(), d.to_vec()]) == 2
    }
}

/// Affine hyperplane `{x : normal·x = offset}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane3 {
    normal: Vec4,
    offset: ExactScalar,
}

impl Hyperplane3 {
    pub fn new(normal: Vec4, offset: ExactScalar) -> Result<Self, GeometryError> {
        if is_zero4(&normal) {
            return Err(GeometryError::ZeroNormal);
        }
        Ok(Self { normal, offset })
    }

    pub fn normal(&self) -> &Vec4 {
        &self.normal
    }

    pub fn offset(&self) -> &ExactScalar {
        &self.offset
    }

    /// Normal scaled so its first nonzero coordinate is 1.
    pub fn canonical(&self) -> Hyperplane3 {
        let pivot = first_nonzero(&self.normal).expect("nonzero normal");
        let s = self.normal[pivot].recip();
        Hyperplane3 { normal: scale4(&self.normal, &s), offset: &self.offset * &s }
    }

    pub fn contains_point(&self, p: &Vec4) -> bool {
        dot4(&self.normal, p) == self.offset
    }

    /// Unique hyperplane through a point and three independent directions.
    fn through(point: &Vec4, directions: &[Vec<ExactScalar>]) -> Option<Hyperplane3> {
        let ns = null_space(directions, 4);
        if ns.len() != 1 {
            return None;
        }
        let normal: Vec4 = std::array::from_fn(|i| ns[0][i].clone());
        let offset = dot4(&normal, point);
        Some(Hyperplane3 { normal, offset }.canonical())
    }
}

/// How a line meets a 2-flat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IncidenceOutcome {
    Disjoint,
    /// Exactly one common point.
    Point(Vec4),
    /// The line lies in the flat.
    Contained,
}

impl IncidenceOutcome {
    pub fn is_point(&self) -> bool {
        matches!(self, IncidenceOutcome::Point(_))
    }
}

/// Solve `p + t·d = q + a·u + b·v` exactly.
pub fn classify_line_flat2(ln: &Line4, fl: &Flat2) -> IncidenceOutcome {
    // columns: d, -u, -v | q - p
    let rhs = sub4(&fl.base, &ln.base);
    let mut m: Vec<Vec<ExactScalar>> = (0..4)
        .map(|i| vec![ln.direction[i].clone(), -fl.u[i].clone(), -fl.v[i].clone(), rhs[i].clone()])
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&3) {
        return IncidenceOutcome::Disjoint;
    }
    if pivots.len() == 3 {
        // pivots are exactly the three unknowns; row 0 holds t
        return IncidenceOutcome::Point(ln.point_at(&m[0][3]));
    }
    IncidenceOutcome::Contained
}

pub fn line_in_flat2(ln: &Line4, fl: &Flat2) -> bool {
    classify_line_flat2(ln, fl) == IncidenceOutcome::Contained
}

pub fn flat2_in_hyperplane(fl: &Flat2, h: &Hyperplane3) -> bool {
    h.contains_point(&fl.base) && dot4(&h.normal, &fl.u).is_zero() && dot4(&h.normal, &fl.v).is_zero()
}

/// Whether two lines share a 2-flat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinePairSpan {
    /// The unique 2-flat containing both lines, canonical.
    Coplanar(Flat2),
    NotCoplanar,
}

/// The 2-flat spanned by two distinct lines, if they are intersecting or parallel.
pub fn span_flat2_of_lines(l1: &Line4, l2: &Line4) -> Result<LinePairSpan, GeometryError> {
    if l1.same_as(l2) {
        return Err(GeometryError::IdenticalLines);
    }
    let offset = sub4(&l2.base, &l1.base);
    let vectors = [l1.direction.clone(), l2.direction.clone(), offset];
    let mut rows: Vec<Vec<ExactScalar>> = vectors.iter().map(|v| v.to_vec()).collect();
    let pivots = rref(&mut rows);
    if pivots.len() != 2 {
        return Ok(LinePairSpan::NotCoplanar);
    }
    let to4 = |r: &Vec<ExactScalar>| -> Vec4 { std::array::from_fn(|i| r[i].clone()) };
    let flat = Flat2 { base: l1.base.clone(), u: to4(&rows[0]), v: to4(&rows[1]) };
    Ok(LinePairSpan::Coplanar(flat.canonical()))
}

/// The hyperplane containing two distinct 2-flats, if their affine hull is
/// 3-dimensional (this covers both crossing and parallel pairs).
pub fn hyperplane_of_flat2_pair(f1: &Flat2, f2: &Flat2) -> Result<Option<Hyperplane3>, GeometryError> {
    if f1.same_as(f2) {
        return Err(GeometryError::IdenticalFlats);
    }
    let vectors = [f1.u.to_vec(), f1.v.to_vec(), f2.u.to_vec(), f2.v.to_vec(), sub4(&f2.base, &f1.base).to_vec()];
    if rank(&vectors) != 3 {
        return Ok(None);
    }
    Ok(Hyperplane3::through(&f1.base, &vectors))
}
