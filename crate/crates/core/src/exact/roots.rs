//! Distinct real roots of a product of polynomials, without forming the product.
//!
//! Each factor is isolated on its own (cheap for low degrees); roots of
//! different factors are then refined against each other until they are
//! either separated or shown to coincide through a common gcd root.

use std::collections::HashMap;

use num_traits::One;

use super::sturm::{isolate_real_roots, SturmSequence};
use super::{int, sign_of, Endpoint, ExactScalar, UniPoly};

/// A real root of factor `factor`: either known exactly or strictly inside `(lo, hi)`.
#[derive(Clone, Debug)]
struct Located {
    factor: usize,
    lo: ExactScalar,
    hi: ExactScalar,
    exact: bool,
}

impl Located {
    fn lower(&self) -> &ExactScalar {
        &self.lo
    }

    fn upper(&self) -> &ExactScalar {
        &self.hi
    }

    fn contains_open(&self, q: &ExactScalar) -> bool {
        &self.lo < q && q < &self.hi
    }
}

struct Factors {
    polys: Vec<UniPoly>,
    seqs: Vec<SturmSequence>,
    gcds: HashMap<(usize, usize), Option<SturmSequence>>,
}

impl Factors {
    fn count_open(seq: &SturmSequence, lo: &ExactScalar, hi: &ExactScalar) -> usize {
        let half_open = seq.count(&Endpoint::Finite(lo.clone()), &Endpoint::Finite(hi.clone()));
        half_open - usize::from(seq.base().sign_at(hi) == 0 && lo < hi)
    }

    fn refine(&self, r: &mut Located) {
        if r.exact {
            return;
        }
        let mid = (&r.lo + &r.hi) / int(2);
        if self.polys[r.factor].sign_at(&mid) == 0 {
            r.lo = mid.clone();
            r.hi = mid;
            r.exact = true;
        } else if Self::count_open(&self.seqs[r.factor], &r.lo, &mid) == 1 {
            r.hi = mid;
        } else {
            r.lo = mid;
        }
    }

    /// Moves the open interval of `r` off the non-root `q`.
    fn split_at(&self, r: &mut Located, q: &ExactScalar) {
        if Self::count_open(&self.seqs[r.factor], &r.lo, q) == 1 {
            r.hi = q.clone();
        } else {
            r.lo = q.clone();
        }
    }

    fn gcd_seq(&mut self, i: usize, j: usize) -> Option<&SturmSequence> {
        let key = (i.min(j), i.max(j));
        if !self.gcds.contains_key(&key) {
            let g = self.polys[key.0].gcd(&self.polys[key.1]);
            let seq = if g.degree() >= 1 { SturmSequence::new(&g).ok() } else { None };
            self.gcds.insert(key, seq);
        }
        self.gcds[&key].as_ref()
    }

    /// Whether two overlapping roots of different factors are the same number.
    fn coincide(&mut self, a: &Located, b: &Located) -> bool {
        match (a.exact, b.exact) {
            (true, true) => a.lo == b.lo,
            (true, false) => b.contains_open(&a.lo) && self.polys[b.factor].sign_at(&a.lo) == 0,
            (false, true) => a.contains_open(&b.lo) && self.polys[a.factor].sign_at(&b.lo) == 0,
            (false, false) => {
                let lo = a.lo.clone().max(b.lo.clone());
                let hi = a.hi.clone().min(b.hi.clone());
                if lo >= hi {
                    return false;
                }
                match self.gcd_seq(a.factor, b.factor) {
                    Some(g) => Factors::count_open(g, &lo, &hi) > 0,
                    None => false,
                }
            }
        }
    }
}

/// Distinct real roots of `Π polys` as a sorted list of disjoint intervals
/// `[lo, hi]` (degenerate when the root is known exactly), plus one rational
/// sample strictly inside every gap. Zero polynomials are not allowed;
/// constants contribute nothing.
pub fn product_root_samples(polys: &[UniPoly]) -> (usize, Vec<ExactScalar>) {
    let mut fs = Factors { polys: Vec::new(), seqs: Vec::new(), gcds: HashMap::new() };
    let mut roots: Vec<Located> = Vec::new();
    for p in polys.iter().filter(|p| p.degree() >= 1) {
        let sf = p.square_free();
        let seq = SturmSequence::new(&sf).expect("nonzero");
        let factor = fs.polys.len();
        for iv in isolate_real_roots(&sf).expect("nonzero") {
            let exact = sf.sign_at(&iv.hi) == 0;
            let lo = if exact { iv.hi.clone() } else { iv.lo };
            roots.push(Located { factor, lo, hi: iv.hi, exact });
        }
        fs.polys.push(sf);
        fs.seqs.push(seq);
    }
    loop {
        roots.sort_by(|a, b| a.lower().cmp(b.lower()));
        let Some(i) = (1..roots.len()).find(|&i| roots[i - 1].upper() >= roots[i].lower()) else {
            break;
        };
        let (a, b) = (roots[i - 1].clone(), roots[i].clone());
        if a.factor != b.factor && fs.coincide(&a, &b) {
            // keep whichever is exact (or either)
            let keep = if b.exact { b } else { a };
            roots[i - 1] = keep;
            roots.remove(i);
            continue;
        }
        match (a.exact, b.exact) {
            (true, true) => unreachable!("equal exact roots of one factor"),
            (true, false) => {
                let q = a.lo.clone();
                if roots[i].contains_open(&q) {
                    fs.split_at(&mut roots[i], &q);
                } else {
                    fs.refine(&mut roots[i]);
                }
            }
            (false, true) => {
                let q = b.lo.clone();
                if roots[i - 1].contains_open(&q) {
                    fs.split_at(&mut roots[i - 1], &q);
                } else {
                    fs.refine(&mut roots[i - 1]);
                }
            }
            (false, false) => {
                fs.refine(&mut roots[i - 1]);
                fs.refine(&mut roots[i]);
            }
        }
    }
    let one = ExactScalar::one();
    let samples = if roots.is_empty() {
        vec![int(0)]
    } else {
        let mut s = vec![roots[0].lower() - &one];
        for w in roots.windows(2) {
            s.push((w[0].upper() + w[1].lower()) / int(2));
        }
        s.push(roots[roots.len() - 1].upper() + &one);
        s
    };
    debug_assert!(samples.iter().all(|t| polys.iter().all(|p| sign_of(&p.eval(t)) != 0)));
    (roots.len(), samples)
}
