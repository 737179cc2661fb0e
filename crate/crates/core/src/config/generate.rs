use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ConfigError, ConfigurationSet, Generated, Provenance};
use crate::exact::{add4, int, scale4, vec4, Vec4};
use crate::geometry::linalg::{null_space, rank};
use crate::geometry::{flat2_in_hyperplane, line_in_flat2, Flat2, Hyperplane3, Line4};

/// Coordinate bound used when a spec does not give one.
pub const DEFAULT_RANGE: i64 = 1000;

/// Bound on the small integer multipliers used to build planted objects
/// inside their host flat or hyperplane.
const PLANT_RANGE: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum GeneratorSpec {
    Generic {
        lines: usize,
        planes: usize,
        #[serde(default = "default_range")]
        range: i64,
    },
    Star {
        lines: usize,
        planes: usize,
        #[serde(default)]
        center: [i64; 4],
    },
    PlantedRichFlat {
        lines: usize,
        planes: usize,
        k: usize,
        #[serde(default = "default_range")]
        range: i64,
    },
    PlantedRichHyperplane {
        lines: usize,
        planes: usize,
        k: usize,
        #[serde(default = "default_range")]
        range: i64,
    },
    Mixed {
        lines: usize,
        planes: usize,
        flat_k: usize,
        hyperplane_k: usize,
        #[serde(default = "default_range")]
        range: i64,
    },
}

fn default_range() -> i64 {
    DEFAULT_RANGE
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Generic { .. } => "generic",
            GeneratorSpec::Star { .. } => "star",
            GeneratorSpec::PlantedRichFlat { .. } => "planted_rich_flat",
            GeneratorSpec::PlantedRichHyperplane { .. } => "planted_rich_hyperplane",
            GeneratorSpec::Mixed { .. } => "mixed",
        }
    }

    /// (L, S)
    pub fn counts(&self) -> (usize, usize) {
        match *self {
            GeneratorSpec::Generic { lines, planes, .. }
            | GeneratorSpec::Star { lines, planes, .. }
            | GeneratorSpec::PlantedRichFlat { lines, planes, .. }
            | GeneratorSpec::PlantedRichHyperplane { lines, planes, .. }
            | GeneratorSpec::Mixed { lines, planes, .. } => (lines, planes),
        }
    }

    /// Planted multiplicities (lines in the flat, planes in the hyperplane).
    fn planted(&self) -> (usize, usize) {
        match *self {
            GeneratorSpec::PlantedRichFlat { k, .. } => (k, 0),
            GeneratorSpec::PlantedRichHyperplane { k, .. } => (0, k),
            GeneratorSpec::Mixed { flat_k, hyperplane_k, .. } => (flat_k, hyperplane_k),
            _ => (0, 0),
        }
    }

    fn range(&self) -> i64 {
        match *self {
            GeneratorSpec::Generic { range, .. }
            | GeneratorSpec::PlantedRichFlat { range, .. }
            | GeneratorSpec::PlantedRichHyperplane { range, .. }
            | GeneratorSpec::Mixed { range, .. } => range,
            GeneratorSpec::Star { .. } => DEFAULT_RANGE,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let (l, s) = self.counts();
        let (fk, hk) = self.planted();
        if fk > l {
            return Err(ConfigError::InvalidSpec(format!("planted flat multiplicity {fk} exceeds L = {l}")));
        }
        if hk > s {
            return Err(ConfigError::InvalidSpec(format!("planted hyperplane multiplicity {hk} exceeds S = {s}")));
        }
        if self.range() < 2 {
            return Err(ConfigError::RangeTooSmall(self.range()));
        }
        Ok(())
    }

    fn provenance(&self) -> Provenance {
        let (l, s) = self.counts();
        let mut params = vec![("L", l.to_string()), ("S", s.to_string())];
        match self {
            GeneratorSpec::Star { center, .. } => params.push(("center", format!("{center:?}"))),
            _ => params.push(("range", self.range().to_string())),
        }
        let (fk, hk) = self.planted();
        if matches!(self, GeneratorSpec::PlantedRichFlat { .. } | GeneratorSpec::Mixed { .. }) {
            params.push(("flat_k", fk.to_string()));
        }
        if matches!(self, GeneratorSpec::PlantedRichHyperplane { .. } | GeneratorSpec::Mixed { .. }) {
            params.push(("hyperplane_k", hk.to_string()));
        }
        Provenance::new(self.name(), &params)
    }
}

/// The structures a planted generator deliberately placed, with the indices
/// of the objects it placed in them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlantedTruth {
    pub flat: Option<Flat2>,
    pub flat_lines: Vec<usize>,
    pub hyperplane: Option<Hyperplane3>,
    pub hyperplane_planes: Vec<usize>,
}

struct Sampler {
    rng: ChaCha8Rng,
    range: i64,
    budget: usize,
}

impl Sampler {
    fn new(seed: u64, range: i64, objects: usize) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), range, budget: 1000 + 200 * objects }
    }

    fn coord(&mut self, bound: i64) -> i64 {
        self.rng.random_range(-bound..=bound)
    }

    fn point(&mut self) -> Vec4 {
        let r = self.range;
        vec4(std::array::from_fn(|_| self.coord(r)))
    }

    fn small(&mut self) -> i64 {
        self.coord(PLANT_RANGE)
    }

    fn spend(&mut self, what: &'static str, range_limited: bool) -> Result<(), ConfigError> {
        if self.budget == 0 {
            return Err(if range_limited {
                ConfigError::RangeTooSmall(self.range)
            } else {
                ConfigError::RejectionBudgetExceeded(what)
            });
        }
        self.budget -= 1;
        Ok(())
    }

    fn line(&mut self) -> Option<Line4> {
        let (p, d) = (self.point(), self.point());
        Line4::new(p, d).ok()
    }

    fn flat(&mut self) -> Option<Flat2> {
        let (q, u, v) = (self.point(), self.point(), self.point());
        Flat2::new(q, u, v).ok()
    }
}

fn combo(a: i64, x: &Vec4, b: i64, y: &Vec4) -> Vec4 {
    add4(&scale4(x, &int(a)), &scale4(y, &int(b)))
}

/// Generic lines and planes with integer coordinates in `[-range, range]`.
pub fn gen_generic(l: usize, s: usize, seed: u64, range: i64) -> Result<ConfigurationSet, ConfigError> {
    gen_planted(&GeneratorSpec::Generic { lines: l, planes: s, range }, seed).map(|g| g.config)
}

/// Lines and planes all through `center`, with no line parallel to any plane.
pub fn gen_star(l: usize, s: usize, center: &Vec4, seed: u64) -> Result<ConfigurationSet, ConfigError> {
    let mut sm = Sampler::new(seed, DEFAULT_RANGE, l + s);
    let mut seen = HashSet::new();
    let mut lines = Vec::with_capacity(l);
    while lines.len() < l {
        sm.spend("star lines", false)?;
        let d = sm.point();
        if let Ok(line) = Line4::new(center.clone(), d) {
            if seen.insert(line.canonical()) {
                lines.push(line);
            }
        }
    }
    let mut seen = HashSet::new();
    let mut planes = Vec::with_capacity(s);
    while planes.len() < s {
        sm.spend("star planes", false)?;
        let (u, v) = (sm.point(), sm.point());
        let Ok(plane) = Flat2::new(center.clone(), u, v) else { continue };
        if lines.iter().any(|ln| plane.contains_direction(ln.direction())) {
            continue;
        }
        if seen.insert(plane.canonical()) {
            planes.push(plane);
        }
    }
    let c: Vec<String> = center.iter().map(ToString::to_string).collect();
    let provenance =
        Provenance::new("star", &[("L", l.to_string()), ("S", s.to_string()), ("center", c.join(","))]);
    ConfigurationSet::new(lines, planes, Some(seed), provenance)
}

/// Runs any generator kind, returning the configuration together with the
/// structures that were planted in it.
pub fn gen_planted(spec: &GeneratorSpec, seed: u64) -> Result<Generated, ConfigError> {
    spec.validate()?;
    if let GeneratorSpec::Star { lines, planes, center } = spec {
        let config = gen_star(*lines, *planes, &vec4(*center), seed)?;
        return Ok(Generated { config, truth: PlantedTruth::default() });
    }
    let (l, s) = spec.counts();
    let (fk, hk) = spec.planted();
    let mut sm = Sampler::new(seed, spec.range(), l + s);
    let mut truth = PlantedTruth::default();

    let mut lines = Vec::with_capacity(l);
    let mut line_keys = HashSet::new();
    if fk > 0 {
        let host = loop {
            sm.spend("planted flat", true)?;
            if let Some(f) = sm.flat() {
                break f;
            }
        };
        while lines.len() < fk {
            sm.spend("planted lines", true)?;
            let p = add4(host.base(), &combo(sm.small(), host.u(), sm.small(), host.v()));
            let d = combo(sm.small(), host.u(), sm.small(), host.v());
            let Ok(line) = Line4::new(p, d) else { continue };
            if line_keys.insert(line.canonical()) {
                lines.push(line);
            }
        }
        truth.flat = Some(host.canonical());
    }
    while lines.len() < l {
        sm.spend("lines", true)?;
        let Some(line) = sm.line() else { continue };
        if truth.flat.as_ref().is_some_and(|f| line_in_flat2(&line, f)) {
            continue;
        }
        if line_keys.insert(line.canonical()) {
            lines.push(line);
        }
    }

    let mut planes = Vec::with_capacity(s);
    let mut plane_keys = HashSet::new();
    if hk > 0 {
        let (h0, w) = loop {
            sm.spend("planted hyperplane", true)?;
            let h0 = sm.point();
            let w = [sm.point(), sm.point(), sm.point()];
            if rank(&w.iter().map(|x| x.to_vec()).collect::<Vec<_>>()) == 3 {
                break (h0, w);
            }
        };
        let rows: Vec<_> = w.iter().map(|x| x.to_vec()).collect();
        let n = &null_space(&rows, 4)[0];
        let normal: Vec4 = std::array::from_fn(|i| n[i].clone());
        let offset = crate::exact::dot4(&normal, &h0);
        let host = Hyperplane3::new(normal, offset).expect("null space vector is nonzero").canonical();
        while planes.len() < hk {
            sm.spend("planted planes", true)?;
            let mut pick = || -> Vec4 {
                let c: [i64; 3] = std::array::from_fn(|_| sm.small());
                add4(&combo(c[0], &w[0], c[1], &w[1]), &scale4(&w[2], &int(c[2])))
            };
            let (shift, u, v) = (pick(), pick(), pick());
            let Ok(plane) = Flat2::new(add4(&h0, &shift), u, v) else { continue };
            if plane_keys.insert(plane.canonical()) {
                planes.push(plane);
            }
        }
        truth.hyperplane = Some(host);
    }
    while planes.len() < s {
        sm.spend("planes", true)?;
        let Some(plane) = sm.flat() else { continue };
        if truth.hyperplane.as_ref().is_some_and(|h| flat2_in_hyperplane(&plane, h)) {
            continue;
        }
        if plane_keys.insert(plane.canonical()) {
            planes.push(plane);
        }
    }

    // Scatter the planted objects so nothing downstream can rely on position.
    if fk > 0 {
        truth.flat_lines = scatter(&mut lines, fk, &mut sm.rng);
    }
    if hk > 0 {
        truth.hyperplane_planes = scatter(&mut planes, hk, &mut sm.rng);
    }
    let config = ConfigurationSet::new(lines, planes, Some(seed), spec.provenance())?;
    Ok(Generated { config, truth })
}

/// Shuffles `items` and returns the new (sorted) positions of the first `k`.
fn scatter<T>(items: &mut Vec<T>, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(rng);
    let mut slots: Vec<Option<T>> = items.drain(..).map(Some).collect();
    *items = order.iter().map(|&i| slots[i].take().expect("permutation")).collect();
    let mut planted: Vec<usize> = order.iter().enumerate().filter(|(_, &old)| old < k).map(|(new, _)| new).collect();
    planted.sort_unstable();
    planted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::classify_line_flat2;

    #[test]
    fn empty_configuration() {
        let cfg = gen_generic(0, 0, 3, 10).unwrap();
        assert_eq!((cfg.num_lines(), cfg.num_planes()), (0, 0));
    }

    #[test]
    fn generic_is_deterministic() {
        let a = gen_generic(6, 4, 11, 100).unwrap();
        let b = gen_generic(6, 4, 11, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_generic(6, 4, 12, 100).unwrap());
    }

    #[test]
    fn generic_seed_42_has_no_incidences() {
        let cfg = gen_generic(5, 5, 42, 1_000_000).unwrap();
        for l in cfg.lines() {
            for p in cfg.planes() {
                assert_eq!(classify_line_flat2(l, p), crate::geometry::IncidenceOutcome::Disjoint);
            }
        }
    }

    #[test]
    fn tiny_range_is_rejected() {
        assert!(matches!(gen_generic(1, 0, 0, 1), Err(ConfigError::RangeTooSmall(1))));
    }

    #[test]
    fn star_meets_at_center() {
        let center = vec4([1, -2, 3, 0]);
        let cfg = gen_star(4, 3, &center, 9).unwrap();
        for l in cfg.lines() {
            for p in cfg.planes() {
                assert_eq!(classify_line_flat2(l, p), crate::geometry::IncidenceOutcome::Point(center.clone()));
            }
        }
    }

    #[test]
    fn planted_flat_holds_its_lines() {
        let g = gen_planted(&GeneratorSpec::PlantedRichFlat { lines: 12, planes: 3, k: 5, range: 50 }, 1).unwrap();
        let flat = g.truth.flat.as_ref().unwrap();
        assert_eq!(g.truth.flat_lines.len(), 5);
        for (i, l) in g.config.lines().iter().enumerate() {
            assert_eq!(line_in_flat2(l, flat), g.truth.flat_lines.contains(&i));
        }
    }

    #[test]
    fn planted_hyperplane_holds_its_planes() {
        let spec = GeneratorSpec::PlantedRichHyperplane { lines: 2, planes: 10, k: 4, range: 50 };
        let g = gen_planted(&spec, 5).unwrap();
        let h = g.truth.hyperplane.as_ref().unwrap();
        for (j, p) in g.config.planes().iter().enumerate() {
            assert_eq!(flat2_in_hyperplane(p, h), g.truth.hyperplane_planes.contains(&j));
        }
    }

    #[test]
    fn zero_multiplicity_matches_generic() {
        let g = gen_planted(&GeneratorSpec::PlantedRichFlat { lines: 7, planes: 4, k: 0, range: 30 }, 8).unwrap();
        let plain = gen_generic(7, 4, 8, 30).unwrap();
        assert_eq!(g.config.lines(), plain.lines());
        assert_eq!(g.config.planes(), plain.planes());
        assert_eq!(g.truth, PlantedTruth::default());
    }

    #[test]
    fn multiplicity_above_count_is_invalid() {
        let spec = GeneratorSpec::PlantedRichHyperplane { lines: 0, planes: 3, k: 4, range: 10 };
        assert!(matches!(gen_planted(&spec, 0), Err(ConfigError::InvalidSpec(_))));
    }
}
