use std::collections::HashMap;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schedule::{Mode, Schedule};
use super::SpongeError;
use crate::dyadic::DyadicComplex;

/// Default cap on the number of cubes in any generated complex.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// One seeded run of the construction: `complexes[i]` lives at level `S_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationTrace {
    pub schedule: Schedule,
    pub seed: u64,
    pub complexes: Vec<DyadicComplex>,
}

impl GenerationTrace {
    /// Number of generation steps after the initial complex.
    pub fn depth(&self) -> usize {
        self.complexes.len() - 1
    }

    pub fn last(&self) -> &DyadicComplex {
        self.complexes.last().expect("non-empty trace")
    }

    /// Per step, per parent cube in canonical order, the sorted child ranks
    /// that were kept.
    pub fn replay_choice_encoding(&self) -> Vec<Vec<Vec<u64>>> {
        self.complexes
            .windows(2)
            .map(|w| w[1].child_choices(&w[0]).expect("nested trace"))
            .collect()
    }
}

/// Independent stream for one parent cube: ChaCha keyed by
/// `(seed, step, parent rank)`, so subsets do not depend on visiting order.
pub fn parent_rng(seed: u64, step: u64, rank: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&step.to_le_bytes());
    key[16..24].copy_from_slice(&rank.to_le_bytes());
    key[24..].copy_from_slice(b"rsponge1");
    ChaCha8Rng::from_seed(key)
}

/// `k` distinct values of `0..n`, uniformly, by a partial Fisher-Yates
/// shuffle over a sparse permutation. Returned sorted.
pub fn sample_subset<R: Rng>(rng: &mut R, n: u64, k: u64) -> Vec<u64> {
    assert!(k <= n, "cannot pick {k} of {n}");
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(k as usize);
    for i in 0..k {
        let j = rng.random_range(i..n);
        let vj = *swapped.get(&j).unwrap_or(&j);
        let vi = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, vi);
        out.push(vj);
    }
    out.sort_unstable();
    out
}

fn level_of(schedule: &Schedule, i: usize) -> Result<u32, SpongeError> {
    schedule
        .level(i)
        .ok_or_else(|| SpongeError::Budget(format!("level S_{i} = {} is too deep", schedule.big_s(i))))
}

fn check_budget(schedule: &Schedule, i: usize, budget: u64) -> Result<(), SpongeError> {
    let count = schedule
        .cube_count(i)
        .and_then(|c| c.to_u64())
        .filter(|&c| c <= budget);
    match count {
        Some(_) => Ok(()),
        None => Err(SpongeError::Budget(format!(
            "complex {i} would need P_{i}·8^S_{i} cubes, more than the budget of {budget}"
        ))),
    }
}

/// Runs `depth` steps of the construction with the given seed.
pub fn generate(schedule: &Schedule, seed: u64, depth: usize, budget: u64) -> Result<GenerationTrace, SpongeError> {
    let report = schedule.validate(Mode::Relaxed);
    if !report.is_valid() {
        return Err(SpongeError::Invalid(Box::new(report)));
    }
    if depth >= schedule.len() {
        return Err(SpongeError::Shape(format!(
            "depth {depth} needs {} schedule entries, have {}",
            depth + 1,
            schedule.len()
        )));
    }
    for i in 0..=depth {
        level_of(schedule, i)?;
        check_budget(schedule, i, budget)?;
    }
    Ok(GenerationTrace {
        schedule: schedule.clone(),
        seed,
        complexes: grow(schedule, seed, depth)?,
    })
}

/// The sampling loop of [`generate`] without validation or budget checks;
/// callers drawing many traces from one schedule check it once.
pub fn grow(schedule: &Schedule, seed: u64, depth: usize) -> Result<Vec<DyadicComplex>, SpongeError> {
    let mut complexes = vec![DyadicComplex::full(level_of(schedule, 0)?)];
    for step in 0..depth {
        let parent = &complexes[step];
        let (n, k) = step_sizes(schedule, step + 1)?;
        let choices: Vec<Vec<u64>> = (0..parent.len() as u64)
            .map(|rank| sample_subset(&mut parent_rng(seed, step as u64, rank), n, k))
            .collect();
        let next = parent.select_children(level_of(schedule, step + 1)?, &choices)?;
        complexes.push(next);
    }
    Ok(complexes)
}

/// `(8^{s_i}, p_i·8^{s_i})`: children per parent and how many are kept.
pub fn step_sizes(schedule: &Schedule, i: usize) -> Result<(u64, u64), SpongeError> {
    let too_big = || SpongeError::Budget(format!("s_{i} = {} is too large to sample", schedule.s(i)));
    let s = schedule.s(i).to_u32().filter(|&s| 3 * s < 64).ok_or_else(too_big)?;
    let n = 1u64 << (3 * s);
    let k = schedule.p(i) * num_rational::BigRational::from_integer(n.into());
    if !k.is_integer() {
        return Err(SpongeError::Shape(format!("p_{i}·8^s_{i} is not an integer")));
    }
    Ok((n, k.to_integer().to_u64().ok_or_else(too_big)?))
}

/// Rebuilds the complexes from the initial one and a choice encoding.
pub fn replay(schedule: &Schedule, encoding: &[Vec<Vec<u64>>]) -> Result<Vec<DyadicComplex>, SpongeError> {
    let mut out = vec![DyadicComplex::full(level_of(schedule, 0)?)];
    for (step, choices) in encoding.iter().enumerate() {
        if step + 1 >= schedule.len() {
            return Err(SpongeError::Shape("encoding longer than schedule".into()));
        }
        let next = out[step].select_children(level_of(schedule, step + 1)?, choices)?;
        out.push(next);
    }
    Ok(out)
}

/// Text form of a choice encoding: one header per step, one line per parent.
pub fn encode_choices(encoding: &[Vec<Vec<u64>>]) -> String {
    let mut out = format!("CHOICES 1 {}\n", encoding.len());
    for (i, step) in encoding.iter().enumerate() {
        out.push_str(&format!("step {i} {}\n", step.len()));
        for set in step {
            let line: Vec<String> = set.iter().map(u64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn decode_choices(text: &str) -> Result<Vec<Vec<Vec<u64>>>, SpongeError> {
    let bad = |line: usize, msg: &str| SpongeError::Parse(format!("choices line {}: {msg}", line + 1));
    let mut lines = text.lines().enumerate();
    let (_, head) = lines.next().ok_or_else(|| bad(0, "empty input"))?;
    let steps: usize = head
        .strip_prefix("CHOICES 1 ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(0, "bad header"))?;
    let mut out = Vec::with_capacity(steps);
    for i in 0..steps {
        let (ln, h) = lines.next().ok_or_else(|| bad(0, "missing step header"))?;
        let mut parts = h.split(' ');
        if parts.next() != Some("step") || parts.next() != Some(i.to_string().as_str()) {
            return Err(bad(ln, "bad step header"));
        }
        let count: usize = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(ln, "bad parent count"))?;
        let mut step = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, l) = lines.next().ok_or_else(|| bad(ln, "missing parent line"))?;
            let set: Result<Vec<u64>, _> = l.split_whitespace().map(str::parse).collect();
            step.push(set.map_err(|_| bad(ln, "bad rank"))?);
        }
        out.push(step);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(bad(ln, "trailing data"));
    }
    Ok(out)
}
