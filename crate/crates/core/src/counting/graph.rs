use std::collections::BTreeSet;

use super::{count_incidences, CountingError};
use crate::config::ConfigurationSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteIncidenceGraph {
    left: usize,
    right: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl BipartiteIncidenceGraph {
    pub fn new(
        left: usize,
        right: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CountingError> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= left || b >= right) {
            return Err(CountingError::InvalidParameters(format!("edge ({a}, {b}) out of range for {left}x{right}")));
        }
        Ok(Self { left, right, edges })
    }

    pub fn left_size(&self) -> usize {
        self.left
    }

    pub fn right_size(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    /// Left neighbourhood of every right vertex as a bitset.
    fn right_neighbourhoods(&self) -> Vec<Bits> {
        let mut out = vec![Bits::new(self.left); self.right];
        for &(a, b) in &self.edges {
            out[b].set(a);
        }
        out
    }
}

/// Edge `(i, j)` whenever line `i` meets plane `j` in exactly one point.
pub fn incidence_graph(cfg: &ConfigurationSet) -> BipartiteIncidenceGraph {
    let report = count_incidences(cfg);
    BipartiteIncidenceGraph {
        left: cfg.num_lines(),
        right: cfg.num_planes(),
        edges: report.records.iter().map(|r| (r.line, r.plane)).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Self::new(n);
        (0..n).for_each(|i| b.set(i));
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &w)| (0..64).filter(move |i| w >> i & 1 == 1).map(move |i| 64 * k + i))
    }
}

/// A complete `K_{s,t}`: `s` left vertices all adjacent to `t` right vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KstWitness {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// `Ok(())` when `g` has no `K_{s,t}` with `s` vertices on the left and `t`
/// on the right, otherwise a verified witness.
pub fn kst_free_check(g: &BipartiteIncidenceGraph, s: usize, t: usize) -> Result<Result<(), KstWitness>, CountingError> {
    if s == 0 || t == 0 || s > g.left || t > g.right {
        return Err(CountingError::InvalidParameters(format!(
            "need 1 <= s <= {} and 1 <= t <= {}, got s={s}, t={t}",
            g.left, g.right
        )));
    }
    let nbhd = g.right_neighbourhoods();
    let mut chosen = Vec::with_capacity(t);
    let found = search(&nbhd, s, t, 0, Bits::full(g.left), &mut chosen);
    Ok(match found {
        None => Ok(()),
        Some((right, common)) => {
            let left: Vec<usize> = common.ones().take(s).collect();
            assert!(left.iter().all(|&a| right.iter().all(|&b| g.has_edge(a, b))), "witness is not complete");
            Err(KstWitness { left, right })
        }
    })
}

/// Depth-first over increasing right t-subsets, pruning once the common
/// neighbourhood drops below `s`.
fn search(
    nbhd: &[Bits],
    s: usize,
    t: usize,
    start: usize,
    common: Bits,
    chosen: &mut Vec<usize>,
) -> Option<(Vec<usize>, Bits)> {
    if chosen.len() == t {
        return Some((chosen.clone(), common));
    }
    let remaining = t - chosen.len();
    for b in start..=nbhd.len() - remaining {
        let next = common.and(&nbhd[b]);
        if next.count() < s {
            continue;
        }
        chosen.push(b);
        if let Some(hit) = search(nbhd, s, t, b + 1, next, chosen) {
            return Some(hit);
        }
        chosen.pop();
    }
    None
}

/// Largest number of edges of an `m × n` bipartite graph without `K_{s,t}`,
/// by exhaustive search (`m·n ≤ 25`).
pub fn zarankiewicz_bruteforce(m: usize, n: usize, s: usize, t: usize) -> Result<usize, CountingError> {
    if m * n > 25 {
        return Err(CountingError::TooLarge { m, n });
    }
    if s == 0 || t == 0 {
        return Err(CountingError::InvalidParameters("s and t must be positive".into()));
    }
    if s > m || t > n {
        return Ok(m * n);
    }
    // rows are left vertices, each a bitmask over the right side; row order is
    // irrelevant, so rows are enumerated as a non-decreasing sequence
    let subsets: Vec<u32> = (0u32..1 << n).filter(|x| x.count_ones() as usize == t).collect();
    let mut state = Search { n, s, subsets, counts: vec![0; 0], best: 0 };
    state.counts = vec![0; state.subsets.len()];
    state.rows(m, 0, 0);
    Ok(state.best)
}

struct Search {
    n: usize,
    s: usize,
    subsets: Vec<u32>,
    counts: Vec<usize>,
    best: usize,
}

impl Search {
    fn rows(&mut self, left: usize, min_mask: u32, edges: usize) {
        if edges + left * self.n <= self.best && left > 0 {
            return;
        }
        if left == 0 {
            self.best = self.best.max(edges);
            return;
        }
        for mask in (min_mask..1 << self.n).rev() {
            let touched: Vec<usize> = (0..self.subsets.len()).filter(|&k| self.subsets[k] & mask == self.subsets[k]).collect();
            if touched.iter().any(|&k| self.counts[k] + 1 >= self.s) {
                continue;
            }
            touched.iter().for_each(|&k| self.counts[k] += 1);
            self.rows(left - 1, mask, edges + mask.count_ones() as usize);
            touched.iter().for_each(|&k| self.counts[k] -= 1);
        }
    }
}
