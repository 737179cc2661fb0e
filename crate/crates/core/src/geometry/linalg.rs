//! Small dense linear algebra over Q.

use num_traits::{One, Zero};

use crate::exact::ExactScalar;

/// Reduced row echelon form in place; returns pivot columns. Zero rows are
/// moved to the bottom.
pub fn rref(rows: &mut [Vec<ExactScalar>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<ExactScalar>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : rows · x = 0}`.
pub fn null_space(rows: &[Vec<ExactScalar>], ncols: usize) -> Vec<Vec<ExactScalar>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![ExactScalar::zero(); ncols];
            v[free] = ExactScalar::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -m[row][free].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn m(rows: &[&[i64]]) -> Vec<Vec<ExactScalar>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_null_space() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = null_space(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &a {
                let dot: ExactScalar = row.iter().zip(&v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn empty_matrix() {
        assert_eq!(rank(&[]), 0);
    }
}
