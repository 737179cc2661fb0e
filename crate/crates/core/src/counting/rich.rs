use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::CountingError;
use crate::geometry::{hyperplane_of_flat2_pair, span_flat2_of_lines, Flat2, Hyperplane3, Line4, LinePairSpan};

/// A degree-1 surface holding many objects.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RichSurface {
    Flat2(Flat2),
    Hyperplane(Hyperplane3),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichFlatRecord {
    /// Canonical form.
    pub flat: RichSurface,
    /// Sorted indices of every object contained in `flat`.
    pub members: Vec<usize>,
    pub multiplicity: usize,
}

fn check_threshold(threshold: usize) -> Result<(), CountingError> {
    if threshold < 2 {
        return Err(CountingError::InvalidParameters(format!("threshold must be at least 2, got {threshold}")));
    }
    Ok(())
}

fn bucket<K: Ord + Clone + Send>(
    n: usize,
    threshold: usize,
    pair: impl Fn(usize, usize) -> Option<K> + Sync,
    wrap: impl Fn(K) -> RichSurface,
) -> Vec<RichFlatRecord> {
    let hits: Vec<(K, usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let pair = &pair;
            (i + 1..n).filter_map(move |j| pair(i, j).map(|k| (k, i, j)))
        })
        .collect();
    let mut buckets: BTreeMap<K, BTreeSet<usize>> = BTreeMap::new();
    for (k, i, j) in hits {
        let members = buckets.entry(k).or_default();
        members.insert(i);
        members.insert(j);
    }
    buckets
        .into_iter()
        .filter(|(_, m)| m.len() >= threshold)
        .map(|(k, m)| RichFlatRecord { flat: wrap(k), multiplicity: m.len(), members: m.into_iter().collect() })
        .collect()
}

/// Every 2-flat containing at least `threshold` of `lines`, sorted by flat.
/// Identical lines are skipped.
pub fn detect_rich_flat2(lines: &[Line4], threshold: usize) -> Result<Vec<RichFlatRecord>, CountingError> {
    check_threshold(threshold)?;
    Ok(bucket(
        lines.len(),
        threshold,
        |i, j| match span_flat2_of_lines(&lines[i], &lines[j]) {
            Ok(LinePairSpan::Coplanar(f)) => Some(f),
            _ => None,
        },
        RichSurface::Flat2,
    ))
}

/// Every hyperplane containing at least `threshold` of `planes`, sorted by
/// hyperplane. Identical planes are skipped.
pub fn detect_rich_hyperplane(planes: &[Flat2], threshold: usize) -> Result<Vec<RichFlatRecord>, CountingError> {
    check_threshold(threshold)?;
    Ok(bucket(
        planes.len(),
        threshold,
        |i, j| match hyperplane_of_flat2_pair(&planes[i], &planes[j]) {
            Ok(Some(h)) => Some(h.canonical()),
            _ => None,
        },
        RichSurface::Hyperplane,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{gen_generic, gen_planted, GeneratorSpec};
    use crate::exact::{int, vec4};
    use crate::geometry::line_in_flat2;

    #[test]
    fn planted_flat_is_found_exactly() {
        let spec = GeneratorSpec::PlantedRichFlat { lines: 20, planes: 0, k: 5, range: 1000 };
        let g = gen_planted(&spec, 3).unwrap();
        let found = detect_rich_flat2(g.config.lines(), 3).unwrap();
        assert_eq!(found.len(), 1);
        let planted = g.truth.flat.unwrap().canonical();
        assert_eq!(found[0].flat, RichSurface::Flat2(planted.clone()));
        assert_eq!(found[0].multiplicity, 5);
        let mut expected = g.truth.flat_lines.clone();
        expected.sort();
        assert_eq!(found[0].members, expected);
        assert!(found[0].members.iter().all(|&i| line_in_flat2(&g.config.lines()[i], &planted)));
    }

    #[test]
    fn generic_lines_are_not_coplanar() {
        let cfg = gen_generic(5, 0, 42, 1000).unwrap();
        assert!(detect_rich_flat2(cfg.lines(), 2).unwrap().is_empty());
    }

    #[test]
    fn concurrent_coplanar_lines() {
        let lines: Vec<Line4> = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0]]
            .into_iter()
            .map(|d| Line4::new(vec4([0; 4]), vec4(d)).unwrap())
            .collect();
        let found = detect_rich_flat2(&lines, 2).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].members, vec![0, 1, 2]);
        assert!(detect_rich_flat2(&lines, 1).is_err());
    }

    #[test]
    fn planted_hyperplane_is_found_exactly() {
        let spec = GeneratorSpec::PlantedRichHyperplane { lines: 0, planes: 10, k: 4, range: 1000 };
        let g = gen_planted(&spec, 11).unwrap();
        let found = detect_rich_hyperplane(g.config.planes(), 3).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].flat, RichSurface::Hyperplane(g.truth.hyperplane.unwrap().canonical()));
        assert_eq!(found[0].multiplicity, 4);
    }

    fn flat(p: [i64; 4], u: [i64; 4], v: [i64; 4]) -> Flat2 {
        Flat2::new(vec4(p), vec4(u), vec4(v)).unwrap()
    }

    #[test]
    fn complementary_planes_have_no_hyperplane() {
        let planes = [flat([0; 4], [1, 0, 0, 0], [0, 1, 0, 0]), flat([0; 4], [0, 0, 1, 0], [0, 0, 0, 1])];
        assert!(detect_rich_hyperplane(&planes, 2).unwrap().is_empty());
    }

    #[test]
    fn parallel_planes_share_a_hyperplane() {
        let planes = [flat([0; 4], [1, 0, 0, 0], [0, 1, 0, 0]), flat([0, 0, 5, 0], [1, 0, 0, 0], [0, 1, 0, 0])];
        let found = detect_rich_hyperplane(&planes, 2).unwrap();
        assert_eq!(found.len(), 1);
        let x4 = Hyperplane3::new(vec4([0, 0, 0, 1]), int(0)).unwrap().canonical();
        assert_eq!(found[0].flat, RichSurface::Hyperplane(x4));
        assert_eq!(found[0].multiplicity, 2);
    }
}
