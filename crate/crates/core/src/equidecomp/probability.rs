use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EquidecompError;
use crate::dyadic::{CubeId, DyadicComplex, DyadicRational};
use crate::entropy::binomial;
use crate::motions::{DyadicMotion, SignedPerm};
use crate::search::geom::IntBox;
use crate::search::{detect_subcongruent_exact, Disjointness};
use crate::sponge::{generate, grow, step_sizes, Schedule, DEFAULT_BUDGET};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Deepest level handled by exact enumeration: complexes fit in a `u64` mask.
const EXACT_MAX_LEVEL: u32 = 2;

/// Which event is measured: the exact detector fires on the complex at
/// `depth` with these parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbabilityQuery {
    pub depth: usize,
    pub s_level: u32,
    pub resolution: u32,
    pub disjointness: Disjointness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbabilityMode {
    MonteCarlo { trials: u64, seed: u64 },
    /// Enumerates every outcome; fails when there are more than `budget`.
    Exact { budget: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    /// Half-width of the 99% normal-approximation interval.
    pub half_width: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactProbability {
    pub hits: u64,
    pub total: u64,
    pub probability: BigRational,
    /// Orbits of outcomes under the 48 symmetries of `K₀`; the detector runs
    /// once per orbit.
    pub classes: u64,
}

impl ExactProbability {
    /// Half-width of the 99% interval for a mean of `trials` draws.
    pub fn half_width(&self, trials: u64) -> f64 {
        let p = self.probability.to_f64().unwrap_or(0.0);
        Z_99 * (p * (1.0 - p) / trials as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbabilityResult {
    MonteCarlo(MonteCarloEstimate),
    Exact(ExactProbability),
}

/// Probability that the complex generated at `query.depth` contains a
/// subcongruent `S`-cube over the searched subgroup.
pub fn subcongruence_probability(
    schedule: &Schedule,
    query: &ProbabilityQuery,
    mode: ProbabilityMode,
) -> Result<ProbabilityResult, EquidecompError> {
    ProbabilityExperiment::new(schedule, *query)?.run(mode)
}

/// A schedule and query with the detector verdicts seen so far, so repeated
/// runs only pay for outcomes they have not met before. Verdicts are keyed
/// by symmetry orbit when the final complex fits in a `u64` mask.
pub struct ProbabilityExperiment<'a> {
    schedule: &'a Schedule,
    query: ProbabilityQuery,
    fast: Option<MaskDetector>,
    by_mask: HashMap<u64, bool>,
    by_complex: HashMap<DyadicComplex, bool>,
}

impl<'a> ProbabilityExperiment<'a> {
    pub fn new(schedule: &'a Schedule, query: ProbabilityQuery) -> Result<Self, EquidecompError> {
        let fast = match schedule.level(query.depth) {
            Some(l) if l <= EXACT_MAX_LEVEL => Some(MaskDetector::new(l, &query)?),
            _ => None,
        };
        Ok(Self {
            schedule,
            query,
            fast,
            by_mask: HashMap::new(),
            by_complex: HashMap::new(),
        })
    }

    pub fn run(&mut self, mode: ProbabilityMode) -> Result<ProbabilityResult, EquidecompError> {
        match mode {
            ProbabilityMode::MonteCarlo { trials, seed } => self.monte_carlo(trials, seed).map(ProbabilityResult::MonteCarlo),
            ProbabilityMode::Exact { budget } => self.exact(budget).map(ProbabilityResult::Exact),
        }
    }

    fn monte_carlo(&mut self, trials: u64, seed: u64) -> Result<MonteCarloEstimate, EquidecompError> {
        if trials == 0 {
            return Err(EquidecompError::Precondition("at least one trial is needed".into()));
        }
        let q = self.query;
        // validation and budget checks once; trials then reuse the sampling loop
        generate(self.schedule, seed, q.depth, DEFAULT_BUDGET)?;
        let mut seeds = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0u64;
        for _ in 0..trials {
            let mut trace = grow(self.schedule, seeds.next_u64(), q.depth)?;
            let m = trace.pop().expect("non-empty");
            let hit = match &self.fast {
                Some(det) => {
                    let key = det.tables.least_image(complex_to_mask(&m));
                    *self.by_mask.entry(key).or_insert_with(|| det.detects(key))
                }
                None => match self.by_complex.get(&m) {
                    Some(&h) => h,
                    None => {
                        let h = detects(&m, &q)?;
                        if self.by_complex.len() < 1 << 20 {
                            self.by_complex.insert(m, h);
                        }
                        h
                    }
                },
            };
            hits += u64::from(hit);
        }
        let estimate = hits as f64 / trials as f64;
        let half_width = Z_99 * (estimate * (1.0 - estimate) / trials as f64).sqrt();
        Ok(MonteCarloEstimate {
            hits,
            trials,
            estimate,
            half_width,
        })
    }
}

fn detects(m: &DyadicComplex, q: &ProbabilityQuery) -> Result<bool, EquidecompError> {
    Ok(detect_subcongruent_exact(m, q.s_level, q.resolution, q.disjointness)?.is_some())
}

/// The exact detector restated on bit masks, for levels where a complex fits
/// in a `u64`. Same candidates, motions and acceptance test; only the verdict
/// is reported.
struct MaskDetector {
    level: u32,
    step: i64,
    disjointness: Disjointness,
    tables: SymmetryTables,
    /// `(box of A, cells of A)` for every `S`-cube, in canonical order.
    regions: Vec<(IntBox, u64)>,
}

impl MaskDetector {
    fn new(level: u32, q: &ProbabilityQuery) -> Result<Self, EquidecompError> {
        if q.s_level > level || q.resolution > level {
            return Err(crate::search::SearchError::Level(format!(
                "need S ({}) and resolution ({}) at most the complex level {level}",
                q.s_level, q.resolution
            ))
            .into());
        }
        let regions = DyadicComplex::full(q.s_level)
            .iter()
            .map(|a| {
                let cells = a.descendants(level).fold(0u64, |acc, c| acc | 1 << cell_index(c.coords(), level));
                (IntBox::of_cube(&a, level), cells)
            })
            .collect();
        Ok(Self {
            level,
            step: 1 << (level - q.resolution),
            disjointness: q.disjointness,
            tables: SymmetryTables::new(level),
            regions,
        })
    }

    fn detects(&self, m: u64) -> bool {
        let l = self.level;
        let side = 1i64 << l;
        let perms: Vec<SignedPerm> = SignedPerm::all().collect();
        for (a_box, a_cells) in &self.regions {
            let part = m & a_cells;
            if part == 0 {
                continue;
            }
            for (g, perm) in perms.iter().enumerate() {
                // the symmetry of K₀ with this linear part; the detector's
                // translation differs from `u` below by a whole-cube shift,
                // which keeps the grid and the order of translations
                let img = self.tables.apply(g, part);
                let mut bmin = [i64::MAX; 3];
                let mut bmax = [i64::MIN; 3];
                let mut bits = img;
                while bits != 0 {
                    let c = cell_of(bits.trailing_zeros(), l);
                    bits &= bits - 1;
                    for i in 0..3 {
                        bmin[i] = bmin[i].min(c[i]);
                        bmax[i] = bmax[i].max(c[i]);
                    }
                }
                let sym_box = symmetric_box(*perm, a_box, side);
                let lo = [0, 1, 2].map(|i| -(bmin[i] / self.step));
                let hi = [0, 1, 2].map(|i| (side - 1 - bmax[i]).div_euclid(self.step));
                for uz in lo[2]..=hi[2] {
                    for uy in lo[1]..=hi[1] {
                        for ux in lo[0]..=hi[0] {
                            let u = [ux * self.step, uy * self.step, uz * self.step];
                            if perm.is_identity() && u == [0, 0, 0] {
                                continue;
                            }
                            let moved = IntBox {
                                level: l,
                                lo: [0, 1, 2].map(|i| sym_box.lo[i] + u[i]),
                                hi: [0, 1, 2].map(|i| sym_box.hi[i] + u[i]),
                            };
                            if !self.disjointness.disjoint(a_box, &moved) {
                                continue;
                            }
                            let shift = (u[0] << (2 * l)) + (u[1] << l) + u[2];
                            let shifted = if shift >= 0 { img << shift } else { img >> -shift };
                            if shifted & !m == 0 {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

/// Image of `b` under the symmetry of `[0, side]³` with linear part `perm`.
fn symmetric_box(perm: SignedPerm, b: &IntBox, side: i64) -> IntBox {
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for i in 0..3 {
        let j = perm.source_axis(i);
        if perm.sign(i) > 0 {
            (lo[i], hi[i]) = (b.lo[j], b.hi[j]);
        } else {
            (lo[i], hi[i]) = (side - b.hi[j], side - b.lo[j]);
        }
    }
    IntBox { level: b.level, lo, hi }
}

/// The 48 isometries of `K₀`: a signed permutation followed by the shift
/// that brings the cube back onto itself.
pub fn cube_symmetries() -> Vec<DyadicMotion> {
    SignedPerm::all()
        .map(|p| {
            let t = [0, 1, 2].map(|i| DyadicRational::from_int(i64::from(p.sign(i) < 0)));
            DyadicMotion::new(p, t)
        })
        .collect()
}

fn cell_index(c: [i64; 3], level: u32) -> u32 {
    ((c[0] << (2 * level)) | (c[1] << level) | c[2]) as u32
}

fn cell_of(i: u32, level: u32) -> [i64; 3] {
    let m = (1i64 << level) - 1;
    let i = i64::from(i);
    [(i >> (2 * level)) & m, (i >> level) & m, i & m]
}

#[cfg(test)]
fn mask_to_complex(mask: u64, level: u32) -> DyadicComplex {
    let cells = (0..64u32).filter(|&i| mask >> i & 1 == 1).map(|i| cell_of(i, level)).collect();
    DyadicComplex::from_sorted(level, cells).expect("ascending indices are canonical")
}

fn complex_to_mask(m: &DyadicComplex) -> u64 {
    m.coords().iter().fold(0, |acc, &c| acc | 1u64 << cell_index(c, m.level()))
}

/// Bit permutations of the level-`level` cells, one per symmetry, applied a
/// byte at a time.
struct SymmetryTables {
    bytes: usize,
    lut: Vec<[u64; 256]>,
}

impl SymmetryTables {
    fn new(level: u32) -> Self {
        let cells = 1u32 << (3 * level);
        let bytes = cells.div_ceil(8) as usize;
        let mut lut = Vec::with_capacity(48 * bytes);
        for g in cube_symmetries() {
            let image: Vec<u32> = (0..cells)
                .map(|i| {
                    let c = g.image_cube(&CubeId::extended(level, cell_of(i, level))).expect("integral");
                    cell_index(c.coords(), level)
                })
                .collect();
            for b in 0..bytes {
                let mut t = [0u64; 256];
                for (v, slot) in t.iter_mut().enumerate() {
                    for bit in 0..8 {
                        let i = b * 8 + bit;
                        if v >> bit & 1 == 1 && i < cells as usize {
                            *slot |= 1u64 << image[i];
                        }
                    }
                }
                lut.push(t);
            }
        }
        Self { bytes, lut }
    }

    fn apply(&self, g: usize, mask: u64) -> u64 {
        let t = &self.lut[g * self.bytes..(g + 1) * self.bytes];
        t.iter()
            .enumerate()
            .fold(0, |acc, (b, tb)| acc | tb[(mask >> (8 * b)) as usize & 0xff])
    }

    fn least_image(&self, mask: u64) -> u64 {
        (0..48).map(|g| self.apply(g, mask)).min().expect("48 symmetries")
    }

    /// Orbit size if `mask` is the least element of its orbit.
    fn canonical_orbit(&self, mask: u64) -> Option<u64> {
        let mut images = [0u64; 48];
        for (g, slot) in images.iter_mut().enumerate() {
            let v = self.apply(g, mask);
            if v < mask {
                return None;
            }
            *slot = v;
        }
        images.sort_unstable();
        Some(1 + images.windows(2).filter(|w| w[0] != w[1]).count() as u64)
    }
}

/// All `k`-subsets of `0..n`, each as a sorted list.
fn subsets(n: u64, k: u64) -> Vec<Vec<u64>> {
    fn go(start: u64, n: u64, k: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() as u64 == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

struct Enumerator<'a> {
    levels: Vec<u32>,
    /// Child-cell bit masks, per step, for each subset of child ranks,
    /// relative to a parent at the origin.
    choice_bits: Vec<Vec<Vec<u32>>>,
    depth: usize,
    detector: &'a MaskDetector,
    verdicts: &'a mut HashMap<u64, bool>,
    result: ExactProbability,
}

impl Enumerator<'_> {
    fn walk(&mut self, step: usize, parents: &[[i64; 3]], idx: usize, acc: u64) -> Result<(), EquidecompError> {
        let level = self.levels[step + 1];
        if idx == parents.len() {
            if step + 1 == self.depth {
                return self.leaf(acc);
            }
            let cells: Vec<[i64; 3]> = (0..64u32).filter(|&i| acc >> i & 1 == 1).map(|i| cell_of(i, level)).collect();
            return self.walk(step + 1, &cells, 0, 0);
        }
        let d = level - self.levels[step];
        let p = parents[idx];
        let offset = [p[0] << d, p[1] << d, p[2] << d];
        for r in 0..self.choice_bits[step].len() {
            let mut bits = acc;
            for &rel in &self.choice_bits[step][r] {
                let c = cell_of(rel, d);
                bits |= 1u64 << cell_index([offset[0] + c[0], offset[1] + c[1], offset[2] + c[2]], level);
            }
            self.walk(step, parents, idx + 1, bits)?;
        }
        Ok(())
    }

    fn leaf(&mut self, mask: u64) -> Result<(), EquidecompError> {
        self.result.total += 1;
        if let Some(orbit) = self.detector.tables.canonical_orbit(mask) {
            self.result.classes += 1;
            let det = self.detector;
            if *self.verdicts.entry(mask).or_insert_with(|| det.detects(mask)) {
                self.result.hits += orbit;
            }
        }
        Ok(())
    }
}

impl ProbabilityExperiment<'_> {
    fn exact(&mut self, budget: u64) -> Result<ExactProbability, EquidecompError> {
            let (schedule, q) = (self.schedule, &self.query);
        if q.depth >= schedule.len() {
            return Err(EquidecompError::Precondition(format!("schedule has no step {}", q.depth)));
        }
        let mut levels = Vec::with_capacity(q.depth + 1);
        for i in 0..=q.depth {
            match schedule.level(i) {
                Some(l) if l <= EXACT_MAX_LEVEL => levels.push(l),
                _ => {
                    return Err(EquidecompError::Budget(format!(
                        "exact enumeration needs levels at most {EXACT_MAX_LEVEL}; S_{i} = {}",
                        schedule.big_s(i)
                    )))
                }
            }
        }
        let report = schedule.validate(crate::sponge::Mode::Relaxed);
        if !report.is_valid() {
            return Err(crate::sponge::SpongeError::Invalid(Box::new(report)).into());
        }
        // ∏_i C(8^{s_i}, k_i)^{m_{i-1}} outcomes
        let mut total = BigUint::one();
        let mut choice_bits = Vec::with_capacity(q.depth);
        for i in 1..=q.depth {
            let (n, k) = step_sizes(schedule, i)?;
            let parents = schedule.cube_count(i - 1).and_then(|c| c.to_u32()).expect("small level");
            total *= binomial(n, k).pow(parents);
            if total > BigUint::from(budget) {
                return Err(EquidecompError::Budget(format!("more than {budget} outcomes")));
            }
            choice_bits.push(subsets(n, k).into_iter().map(|s| s.into_iter().map(|r| r as u32).collect()).collect());
        }
        let final_level = levels[q.depth];
        let mut e = Enumerator {
            levels,
            choice_bits,
            depth: q.depth,
            detector: self.fast.as_ref().expect("levels checked above"),
            verdicts: &mut self.by_mask,
            result: ExactProbability {
                hits: 0,
                total: 0,
                probability: BigRational::one(),
                classes: 0,
            },
        };
        if q.depth == 0 {
            e.leaf(u64::MAX >> (64 - (1u32 << (3 * final_level))))?;
        } else {
            let start = DyadicComplex::full(e.levels[0]);
            e.walk(0, start.coords(), 0, 0)?;
        }
        let mut r = e.result;
        debug_assert_eq!(BigUint::from(r.total), total);
        r.probability = BigRational::new(r.hits.into(), r.total.into());
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(depth: usize, s: u32, d: Disjointness) -> ProbabilityQuery {
        ProbabilityQuery {
            depth,
            s_level: s,
            resolution: 2,
            disjointness: d,
        }
    }

    #[test]
    fn symmetries_fix_the_unit_cube() {
        let syms = cube_symmetries();
        assert_eq!(syms.len(), 48);
        let full = DyadicComplex::full(2);
        for g in &syms {
            assert_eq!(g.apply_to_complex(&full).unwrap(), full);
        }
        let t = SymmetryTables::new(2);
        let m = 0b1011u64;
        let img = mask_to_complex(t.apply(5, m), 2);
        assert_eq!(img, syms[5].apply_to_complex(&mask_to_complex(m, 2)).unwrap());
    }

    #[test]
    fn mask_detector_agrees_with_exact_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for level in 1..=2u32 {
            let cells = 1u32 << (3 * level);
            for s in 0..=level {
                for resolution in 0..=level {
                    for d in [Disjointness::Closed, Disjointness::InteriorsOnly] {
                        let q = ProbabilityQuery {
                            depth: 0,
                            s_level: s,
                            resolution,
                            disjointness: d,
                        };
                        let det = MaskDetector::new(level, &q).unwrap();
                        for _ in 0..200 {
                            // sparse and dense masks alike
                            let keep = rng.next_u64() % 8;
                            let mut mask = 0u64;
                            for i in 0..cells {
                                if rng.next_u64() % 8 <= keep {
                                    mask |= 1 << i;
                                }
                            }
                            let m = mask_to_complex(mask, level);
                            assert_eq!(det.detects(mask), detects(&m, &q).unwrap(), "{level} {s} {resolution} {d:?} {mask:#x}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn keep_everything() {
        // p₁ = 1: a single outcome, the full level-2 complex
        let s = Schedule::toy(&[(1, 1), (1, 1)], &[1, 1]).unwrap();
        let e = |lvl| match subcongruence_probability(&s, &query(1, lvl, Disjointness::Closed), ProbabilityMode::Exact { budget: 10 }).unwrap() {
            ProbabilityResult::Exact(e) => e,
            _ => unreachable!(),
        };
        assert_eq!(e(2).probability, BigRational::one());
        assert_eq!(e(2).total, 1);
        // a closed half cube cannot be moved off itself inside K₀
        assert_eq!(e(1).hits, 0);
    }

    #[test]
    fn small_enumeration_matches_monte_carlo() {
        // one parent (s₀ = 0), keep one child of eight: eight outcomes, one orbit
        let s = Schedule::toy(&[(1, 1), (1, 8)], &[0, 1]).unwrap();
        let q = ProbabilityQuery {
            depth: 1,
            s_level: 1,
            resolution: 1,
            disjointness: Disjointness::InteriorsOnly,
        };
        let ProbabilityResult::Exact(e) = subcongruence_probability(&s, &q, ProbabilityMode::Exact { budget: 100 }).unwrap() else {
            unreachable!()
        };
        assert_eq!((e.total, e.classes, e.hits), (8, 1, 0));
        let ProbabilityResult::MonteCarlo(mc) =
            subcongruence_probability(&s, &q, ProbabilityMode::MonteCarlo { trials: 50, seed: 3 }).unwrap()
        else {
            unreachable!()
        };
        assert_eq!(mc.hits, 0);
    }

    #[test]
    fn two_kept_cells_fire_unless_touching() {
        // one parent, keep 2 of 64 cells: a closed-disjoint witness exists
        // exactly when the two cells do not touch. 468 of the 2016 pairs touch.
        let s = Schedule::toy(&[(1, 1), (2, 64)], &[0, 2]).unwrap();
        let q = query(1, 2, Disjointness::Closed);
        let mut x = ProbabilityExperiment::new(&s, q).unwrap();
        let ProbabilityResult::Exact(e) = x.run(ProbabilityMode::Exact { budget: 10_000 }).unwrap() else {
            unreachable!()
        };
        assert_eq!(e.total, 2016);
        assert_eq!(e.probability, BigRational::new(43.into(), 56.into()));
        let ProbabilityResult::MonteCarlo(mc) = x.run(ProbabilityMode::MonteCarlo { trials: 20_000, seed: 5 }).unwrap() else {
            unreachable!()
        };
        assert!((mc.estimate - 43.0 / 56.0).abs() < mc.half_width, "{mc:?}");
    }

    #[test]
    fn errors() {
        let s = Schedule::toy(&[(1, 1), (1, 2)], &[1, 1]).unwrap();
        let q = query(1, 1, Disjointness::Closed);
        assert!(subcongruence_probability(&s, &q, ProbabilityMode::MonteCarlo { trials: 0, seed: 1 }).is_err());
        assert!(matches!(
            subcongruence_probability(&s, &q, ProbabilityMode::Exact { budget: 1000 }),
            Err(EquidecompError::Budget(_))
        ));
    }
}
