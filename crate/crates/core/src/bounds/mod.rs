//! Closed-form incidence bounds, evaluated with certified enclosures and
//! explicit hypothesis checks.

mod cases;
mod real;
mod table;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::ExactScalar;

pub use cases::{
    binomial_truncation_error, eval_cell_decomposition, eval_g2_bound, eval_g3_bound, eval_kst, eval_main_bound,
    eval_rich_points_bound, eval_three_surface_cases, eval_total_and_dominance, eval_two_surface_cases,
    eval_zero_set_cases, kst_formula, CellDecomposition, PruningBound, ThreeSurfaceCases, TotalBound, ZeroSetCases,
    SEPARATION,
};
pub use real::Enclosure;
pub use table::{bound_table_csv, BoundRow};

/// Largest accepted denominator of `ε`; keeps certified roots cheap.
pub const MAX_EPSILON_DENOMINATOR: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("outside the formula's domain: {0}")]
    DomainError(String),
}

/// Operational reading of `L^{1/2} ≪ S ≪ L` as `lower·√L ≤ S ≤ L/upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regime {
    pub lower: ExactScalar,
    pub upper: ExactScalar,
}

impl Default for Regime {
    fn default() -> Self {
        Self { lower: BigRational::from_integer(10.into()), upper: BigRational::from_integer(10.into()) }
    }
}

impl Regime {
    pub fn lower_holds(&self, l: u64, s: u64) -> bool {
        let s = BigRational::from_integer(s.into());
        &s * &s >= &self.lower * &self.lower * BigRational::from_integer(l.into())
    }

    pub fn upper_holds(&self, l: u64, s: u64) -> bool {
        &self.upper * BigRational::from_integer(s.into()) <= BigRational::from_integer(l.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub l: u64,
    pub s: u64,
    pub d: u64,
    pub epsilon: ExactScalar,
    pub rounds: Option<u32>,
    pub regime: Regime,
}

impl BoundParams {
    pub fn new(l: u64, s: u64, d: u64, epsilon: ExactScalar) -> Result<Self, BoundError> {
        let p = Self { l, s, d, epsilon, rounds: None, regime: Regime::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_regime(mut self, regime: Regime) -> Result<Self, BoundError> {
        if !regime.lower.is_positive() || !regime.upper.is_positive() {
            return Err(BoundError::InvalidParams("regime factors must be positive".into()));
        }
        self.regime = regime;
        Ok(self)
    }

    pub fn with_rounds(mut self, rounds: u32) -> Self {
        self.rounds = Some(rounds);
        self
    }

    pub fn validate(&self) -> Result<(), BoundError> {
        self.validate_counts(1)
    }

    /// Checks everything except that `S ≥ min_s`.
    fn validate_counts(&self, min_s: u64) -> Result<(), BoundError> {
        if self.l < 1 || self.s < min_s {
            return Err(BoundError::InvalidParams(format!("need L >= 1 and S >= {min_s}, got L={}, S={}", self.l, self.s)));
        }
        if self.d < 2 {
            return Err(BoundError::InvalidParams(format!("need D >= 2, got {}", self.d)));
        }
        check_epsilon(&self.epsilon, false)
    }
}

pub(crate) fn check_epsilon(eps: &ExactScalar, allow_zero: bool) -> Result<(), BoundError> {
    if eps.is_negative() || (!allow_zero && eps.is_zero()) {
        return Err(BoundError::InvalidParams(format!("epsilon must be positive, got {eps}")));
    }
    if eps.denom() > &MAX_EPSILON_DENOMINATOR.into() {
        return Err(BoundError::InvalidParams(format!(
            "epsilon {eps} has a denominator above {MAX_EPSILON_DENOMINATOR}"
        )));
    }
    Ok(())
}

/// The constants of the argument; `C3 = 3·C1·C2/2` always.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantsProfile {
    c1: ExactScalar,
    c2: ExactScalar,
    c4: ExactScalar,
}

impl Default for ConstantsProfile {
    fn default() -> Self {
        let one = BigRational::from_integer(1.into());
        Self { c1: one.clone(), c2: one.clone(), c4: one }
    }
}

impl ConstantsProfile {
    /// `C1` and `C2` must be positive; `C4 = 0` is allowed and switches its case off.
    pub fn new(c1: ExactScalar, c2: ExactScalar, c4: ExactScalar) -> Result<Self, BoundError> {
        if !c1.is_positive() || !c2.is_positive() || c4.is_negative() {
            return Err(BoundError::InvalidParams(format!("constants must be positive: C1={c1}, C2={c2}, C4={c4}")));
        }
        Ok(Self { c1, c2, c4 })
    }

    /// As [`ConstantsProfile::new`], rejecting a `C3` that breaks the identity.
    pub fn with_c3(c1: ExactScalar, c2: ExactScalar, c3: ExactScalar, c4: ExactScalar) -> Result<Self, BoundError> {
        let p = Self::new(c1, c2, c4)?;
        if p.c3() != c3 {
            return Err(BoundError::InvalidParams(format!("C3 must equal 3*C1*C2/2 = {}, got {c3}", p.c3())));
        }
        Ok(p)
    }

    pub fn c1(&self) -> &ExactScalar {
        &self.c1
    }

    pub fn c2(&self) -> &ExactScalar {
        &self.c2
    }

    pub fn c3(&self) -> ExactScalar {
        &self.c1 * &self.c2 * BigRational::new(3.into(), 2.into())
    }

    pub fn c4(&self) -> &ExactScalar {
        &self.c4
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub value: Enclosure,
    pub hypothesis_satisfied: bool,
    pub hypothesis_detail: String,
}

impl BoundResult {
    pub(crate) fn new(value: Enclosure, hypothesis_satisfied: bool, hypothesis_detail: impl Into<String>) -> Self {
        Self { value, hypothesis_satisfied, hypothesis_detail: hypothesis_detail.into() }
    }

    pub(crate) fn unconditional(value: Enclosure) -> Self {
        Self::new(value, true, "unconditional")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn params_validation() {
        assert!(BoundParams::new(1, 1, 2, ratio(1, 10)).is_ok());
        assert!(BoundParams::new(0, 1, 2, ratio(1, 10)).is_err());
        assert!(BoundParams::new(1, 1, 1, ratio(1, 10)).is_err());
        assert!(BoundParams::new(1, 1, 2, int(0)).is_err());
        assert!(BoundParams::new(1, 1, 2, ratio(1, 1001)).is_err());
    }

    #[test]
    fn c3_identity_is_enforced() {
        let p = ConstantsProfile::new(int(2), int(3), int(1)).unwrap();
        assert_eq!(p.c3(), int(9));
        assert!(ConstantsProfile::with_c3(int(2), int(3), int(9), int(1)).is_ok());
        assert!(ConstantsProfile::with_c3(int(2), int(3), int(8), int(1)).is_err());
        assert!(ConstantsProfile::new(int(0), int(1), int(1)).is_err());
    }

    #[test]
    fn regime_edges() {
        let r = Regime::default();
        assert!(r.lower_holds(10_000, 1000) && r.upper_holds(10_000, 1000));
        assert!(!r.lower_holds(10_000, 999));
        assert!(!r.upper_holds(10_000, 1001));
    }
}
