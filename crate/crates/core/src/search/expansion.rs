use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::safe::{find_safe_cube, format_cube, parse_cube, parse_motion, Reader};
use super::SearchError;
use crate::dyadic::{CubeId, DyadicComplex, DyadicRational};
use crate::motions::{format_mat4, DyadicMotion};
use crate::sponge::sample_subset;

/// A set `U = K ∩ M` with `0 < μ(U) ≤ μ(M)/2` whose images under `S` cover
/// at most `(1+ε)·μ(U)` of `M`, all measured exactly at `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCounterexample {
    pub motions: Vec<DyadicMotion>,
    pub contains_identity: bool,
    pub epsilon: BigRational,
    pub cube: CubeId,
    /// Level at which every measure below is exact.
    pub level: u32,
    pub u: DyadicComplex,
    pub mu_m: DyadicRational,
    pub mu_u: DyadicRational,
    /// `μ(M ∩ ⋃_{δ∈S} δ(U))`.
    pub mu_image: DyadicRational,
}

fn common_level(base: u32, motions: &[DyadicMotion]) -> u32 {
    motions.iter().map(DyadicMotion::resolution).fold(base, u32::max)
}

/// `μ(m ∩ ⋃_{δ∈S} δ(u))`, exactly.
fn image_measure(m: &DyadicComplex, motions: &[DyadicMotion], u: &DyadicComplex) -> Result<DyadicRational, SearchError> {
    let level = common_level(m.level().max(u.level()), motions);
    let u = u.refine(level)?;
    let m = m.refine(level)?;
    let mut union = DyadicComplex::empty(level);
    for d in motions {
        union = union.union(&d.apply_to_complex(&u)?);
    }
    Ok(union.intersect(&m).measure())
}

/// `μ(m ∩ ⋃_{δ∈S} δ(u)) / μ(u)`.
pub fn expansion_ratio(m: &DyadicComplex, motions: &[DyadicMotion], u: &DyadicComplex) -> Result<BigRational, SearchError> {
    if u.is_empty() {
        return Err(SearchError::Precondition("U has measure zero".into()));
    }
    Ok(image_measure(m, motions, u)?.to_rational() / u.measure().to_rational())
}

fn half(x: &DyadicRational) -> DyadicRational {
    x * &DyadicRational::pow2_neg(1)
}

/// Builds the counterexample to `M` being a domain of expansion for `S`
/// from a safe cube for `S ∖ {Id}` in the region `K₀`.
pub fn expansion_counterexample(
    trace: &[DyadicComplex],
    motions: &[DyadicMotion],
    epsilon: &BigRational,
) -> Result<Option<ExpansionCounterexample>, SearchError> {
    if !epsilon.is_positive() {
        return Err(SearchError::Precondition(format!("ε = {epsilon} is not positive")));
    }
    let deepest = trace
        .last()
        .ok_or_else(|| SearchError::Precondition("empty trace".into()))?;
    let others: Vec<DyadicMotion> = motions.iter().filter(|d| !d.is_identity()).cloned().collect();
    let Some(safe) = find_safe_cube(trace, &DyadicComplex::full(0), &others)? else {
        return Ok(None);
    };
    let mu_m = deepest.measure();
    let mut k = safe.cube;
    let mut u = deepest.restrict_to_cube(&k);
    // shrinking keeps every emptiness record, since δ(K') ⊆ δ(K)
    while u.measure() > half(&mu_m) {
        k = (0..8)
            .map(|r| k.descendant(k.level() + 1, r))
            .find(|c| !deepest.restrict_to_cube(c).is_empty())
            .expect("a cube with mass has a child with mass");
        u = deepest.restrict_to_cube(&k);
    }
    let mu_image = image_measure(deepest, motions, &u)?;
    let level = common_level(deepest.level().max(u.level()), motions);
    let cert = ExpansionCounterexample {
        motions: motions.to_vec(),
        contains_identity: motions.len() != others.len(),
        epsilon: epsilon.clone(),
        cube: k,
        level,
        mu_m,
        mu_u: u.measure(),
        u,
        mu_image,
    };
    Ok(cert.inequality_holds().then_some(cert))
}

impl ExpansionCounterexample {
    /// `μ(M ∩ ⋃δ(U)) / μ(U)`.
    pub fn ratio(&self) -> BigRational {
        self.mu_image.to_rational() / self.mu_u.to_rational()
    }

    fn inequality_holds(&self) -> bool {
        let bound = BigRational::one() + &self.epsilon;
        !self.mu_u.is_zero() && self.mu_u <= half(&self.mu_m) && self.ratio() <= bound
    }

    /// Recomputes `U` and every measure from the deepest complex.
    pub fn verify(&self, deepest: &DyadicComplex) -> bool {
        let u = deepest.restrict_to_cube(&self.cube);
        let Ok(mu_image) = image_measure(deepest, &self.motions, &u) else {
            return false;
        };
        u == self.u
            && self.epsilon.is_positive()
            && self.contains_identity == self.motions.iter().any(DyadicMotion::is_identity)
            && deepest.measure() == self.mu_m
            && u.measure() == self.mu_u
            && mu_image == self.mu_image
            && self.level == common_level(deepest.level().max(u.level()), &self.motions)
            && self.inequality_holds()
    }

    pub fn to_record(&self) -> String {
        self.to_string()
    }

    pub fn from_record(text: &str) -> Result<Self, SearchError> {
        let mut r = Reader::new(text);
        r.expect_line("EXPANSION 1")?;
        let epsilon = parse_ratio(r.field("epsilon")?)?;
        let contains_identity = match r.field("identity")? {
            "yes" => true,
            "no" => false,
            v => return Err(SearchError::Parse(format!("bad identity flag {v:?}"))),
        };
        let count: usize = r.number("motions")?;
        let motions = (0..count)
            .map(|_| parse_motion(r.field("motion")?))
            .collect::<Result<Vec<_>, _>>()?;
        let cube = parse_cube(r.field("cube")?)?;
        let level = r.number("level")?;
        let mu_m = r.number("mu_m")?;
        let mu_u = r.number("mu_u")?;
        let mu_image = r.number("mu_image")?;
        let _ratio = r.field("ratio")?;
        let u_level: u32 = r.number("u_level")?;
        let n: usize = r.number("u_cubes")?;
        let mut cells = Vec::with_capacity(n);
        for _ in 0..n {
            let v = r.field("u")?;
            let c: Vec<i64> = v
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| SearchError::Parse(format!("bad cube {v:?}")))?;
            let [x, y, z] = c[..] else {
                return Err(SearchError::Parse(format!("bad cube {v:?}")));
            };
            cells.push([x, y, z]);
        }
        r.finish()?;
        Ok(Self {
            motions,
            contains_identity,
            epsilon,
            cube,
            level,
            u: DyadicComplex::from_coords(u_level, cells)?,
            mu_m,
            mu_u,
            mu_image,
        })
    }
}

fn parse_ratio(s: &str) -> Result<BigRational, SearchError> {
    let bad = || SearchError::Parse(format!("bad rational {s:?}"));
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let a: BigInt = a.trim().parse().map_err(|_| bad())?;
    let b: BigInt = b.trim().parse().map_err(|_| bad())?;
    if b.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(a, b))
}

impl fmt::Display for ExpansionCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "EXPANSION 1")?;
        writeln!(f, "epsilon {}/{}", self.epsilon.numer(), self.epsilon.denom())?;
        writeln!(f, "identity {}", if self.contains_identity { "yes" } else { "no" })?;
        writeln!(f, "motions {}", self.motions.len())?;
        for d in &self.motions {
            writeln!(f, "motion {}", format_mat4(&d.to_mat4()))?;
        }
        writeln!(f, "cube {}", format_cube(&self.cube))?;
        writeln!(f, "level {}", self.level)?;
        writeln!(f, "mu_m {}", self.mu_m)?;
        writeln!(f, "mu_u {}", self.mu_u)?;
        writeln!(f, "mu_image {}", self.mu_image)?;
        let r = self.ratio();
        writeln!(f, "ratio {}/{}", r.numer(), r.denom())?;
        writeln!(f, "u_level {}", self.u.level())?;
        writeln!(f, "u_cubes {}", self.u.len())?;
        for [x, y, z] in self.u.coords() {
            writeln!(f, "u {x} {y} {z}")?;
        }
        Ok(())
    }
}

/// Smallest observed expansion ratio over random cell unions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionEstimate {
    pub min_ratio: BigRational,
    /// The sampled set attaining the minimum.
    pub witness: DyadicComplex,
    pub samples: usize,
}

/// Samples unions `U` of cells of `m` with `μ(U) ≤ μ(m)/2` and returns the
/// least `μ(m ∩ ⋃δ(U))/μ(U)` seen. Any admissible `1+ε` for `m` and `S` is at
/// most this value.
pub fn expansion_estimate(
    m: &DyadicComplex,
    motions: &[DyadicMotion],
    samples: usize,
    seed: u64,
) -> Result<ExpansionEstimate, SearchError> {
    if m.is_empty() || samples == 0 {
        return Err(SearchError::Precondition("need a non-empty complex and at least one sample".into()));
    }
    let mut level = common_level(m.level(), motions);
    let mut cells = m.refine(level)?;
    if cells.len() < 2 {
        level += 1;
        cells = m.refine(level)?;
    }
    let n = cells.len() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(BigRational, DyadicComplex)> = None;
    for _ in 0..samples {
        let size = rand::Rng::random_range(&mut rng, 1..=n / 2);
        let picks = sample_subset(&mut rng, n, size);
        let u = DyadicComplex::from_sorted(level, picks.iter().map(|&i| cells.coords()[i as usize]).collect())?;
        let r = expansion_ratio(&cells, motions, &u)?;
        if best.as_ref().map_or(true, |(b, _)| r < *b) {
            best = Some((r, u));
        }
    }
    let (min_ratio, witness) = best.expect("at least one sample");
    Ok(ExpansionEstimate {
        min_ratio,
        witness,
        samples,
    })
}
