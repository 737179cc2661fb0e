use rayon::prelude::*;
use serde::Serialize;

use super::HarnessError;
use crate::bounds::{bound_table_csv, BoundParams, BoundRow, ConstantsProfile};
use crate::exact::ExactScalar;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GridPoint {
    pub l: u64,
    pub s: u64,
    pub d: u64,
    pub epsilon: ExactScalar,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GridSpec {
    pub points: Vec<GridPoint>,
}

impl GridSpec {
    /// Every combination of the given values.
    pub fn product(ls: &[u64], ss: &[u64], ds: &[u64], epsilons: &[ExactScalar]) -> Self {
        let mut points = Vec::new();
        for &l in ls {
            for &s in ss {
                for &d in ds {
                    for e in epsilons {
                        points.push(GridPoint { l, s, d, epsilon: e.clone() });
                    }
                }
            }
        }
        Self { points }
    }

    /// For each `L`, up to `per_l` log-spaced values of `S` between
    /// `⌈10·L^{1/2}⌉` and `⌊L/10⌋` (none when that range is empty).
    pub fn regime(ls: &[u64], per_l: usize, ds: &[u64], epsilons: &[ExactScalar]) -> Self {
        let mut points = Vec::new();
        for &l in ls {
            for s in regime_values(l, per_l) {
                for &d in ds {
                    for e in epsilons {
                        points.push(GridPoint { l, s, d, epsilon: e.clone() });
                    }
                }
            }
        }
        Self { points }
    }
}

/// Log-spaced integers in `[⌈10·√L⌉, ⌊L/10⌋]`, deduplicated.
fn regime_values(l: u64, count: usize) -> Vec<u64> {
    let lo = {
        // smallest s with s² ≥ 100·L
        let mut s = (10.0 * (l as f64).sqrt()).floor() as u64;
        while u128::from(s) * u128::from(s) < 100 * u128::from(l) {
            s += 1;
        }
        while s > 0 && u128::from(s - 1) * u128::from(s - 1) >= 100 * u128::from(l) {
            s -= 1;
        }
        s
    };
    let hi = l / 10;
    if lo > hi || count == 0 {
        return Vec::new();
    }
    let mut out: Vec<u64> = (0..count)
        .map(|i| {
            if count == 1 {
                return lo;
            }
            let t = i as f64 / (count - 1) as f64;
            let v = (lo as f64 * (hi as f64 / lo as f64).powf(t)).round() as u64;
            v.clamp(lo, hi)
        })
        .collect();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub rows: usize,
    pub in_regime_rows: usize,
    pub max_ratio_in_regime: Option<f64>,
    /// Rows whose cell sum is not certified below the main bound.
    pub cell_dominance_failures: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridReport {
    pub rows: Vec<BoundRow>,
    pub summary: GridSummary,
}

impl GridReport {
    pub fn to_csv(&self) -> String {
        bound_table_csv(&self.rows)
    }
}

/// Evaluates every grid point; rows come out sorted by `(L, S, D, ε)`.
pub fn run_grid(
    grid: &GridSpec,
    constants: &ConstantsProfile,
    dominance_constant: &ExactScalar,
) -> Result<GridReport, HarnessError> {
    let mut points = grid.points.clone();
    points.sort();
    let evaluated: Vec<Result<(BoundRow, bool), HarnessError>> = points
        .par_iter()
        .map(|p| {
            let params = BoundParams::new(p.l, p.s, p.d, p.epsilon.clone())?;
            let cells = crate::bounds::eval_cell_decomposition(&params)?;
            Ok((BoundRow::evaluate(&params, constants, dominance_constant)?, cells.dominated_by_main))
        })
        .collect();
    let mut rows = Vec::with_capacity(evaluated.len());
    let mut cell_dominance_failures = 0;
    for r in evaluated {
        let (row, dominated) = r?;
        cell_dominance_failures += usize::from(!dominated);
        rows.push(row);
    }
    let in_regime: Vec<&BoundRow> = rows.iter().filter(|r| r.regime_ok).collect();
    let max_ratio = in_regime.iter().map(|r| r.ratio).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let text = if rows.is_empty() {
        "no rows".to_string()
    } else {
        match max_ratio {
            Some(m) => format!(
                "{} rows, {} in regime, max total/main ratio in regime {m}, {} cell-dominance failures",
                rows.len(),
                in_regime.len(),
                cell_dominance_failures
            ),
            None => format!("{} rows, none in regime, {} cell-dominance failures", rows.len(), cell_dominance_failures),
        }
    };
    Ok(GridReport {
        summary: GridSummary {
            rows: rows.len(),
            in_regime_rows: in_regime.len(),
            max_ratio_in_regime: max_ratio,
            cell_dominance_failures,
            text,
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn single_fixture_row() {
        let g = GridSpec::product(&[10_000], &[1000], &[2], &[ratio(1, 2)]);
        let r = run_grid(&g, &ConstantsProfile::default(), &int(100)).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].main, 2e7);
        assert_eq!(r.rows[0].cells, 1e7);
        assert_eq!(r.summary.in_regime_rows, 1);
    }

    #[test]
    fn empty_grid() {
        let r = run_grid(&GridSpec::default(), &ConstantsProfile::default(), &int(100)).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.summary.text, "no rows");
        assert_eq!(r.to_csv(), "");
    }

    #[test]
    fn identical_points_give_identical_rows() {
        let g = GridSpec::product(&[5000, 5000], &[300], &[4], &[ratio(1, 4)]);
        let r = run_grid(&g, &ConstantsProfile::default(), &int(100)).unwrap();
        assert_eq!(r.rows[0], r.rows[1]);
    }

    #[test]
    fn regime_values_follow_the_window() {
        assert!(regime_values(1000, 3).is_empty());
        assert_eq!(regime_values(10_000, 3), vec![1000]);
        assert_eq!(regime_values(1_000_000, 3), vec![10_000, 31_623, 100_000]);
        let v = regime_values(100_000, 3);
        assert_eq!((v[0], v[2]), (3163, 10_000));
    }
}
