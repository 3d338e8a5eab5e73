use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SpongeError;
use crate::entropy::{self, Atom, BigCount, TermSum};

/// Parameters `(p_i, s_i)` of the random construction together with the
/// limiting density `p`.
///
/// `P_i = p_0·…·p_i` is the measure of the `i`-th complex and `S_i = s_0+…+s_i`
/// its level. Depth values can be astronomically large, so `s_i` are big
/// integers; only schedules with small `S_i` can actually be generated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Schedule {
    p_target: BigRational,
    p: Vec<BigRational>,
    s: Vec<BigUint>,
}

/// Which conditions a schedule must meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Conditions (a)-(e) are all required.
    Strict,
    /// Only (a)-(c) are required; the growth conditions are reported.
    Relaxed,
}

/// Verdict on one condition over all indices it applies to.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Check {
    /// Indices where the condition certainly fails.
    pub failures: Vec<usize>,
    /// Indices where neither outcome could be certified.
    pub uncertain: Vec<usize>,
}

impl Check {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.uncertain.is_empty()
    }

    fn record(&mut self, i: usize, verdict: Option<bool>) {
        match verdict {
            Some(true) => {}
            Some(false) => self.failures.push(i),
            None => self.uncertain.push(i),
        }
    }
}

/// Condition (b) concerns an infinite product; a prefix can only be
/// consistent with it (partial products non-increasing and `≥ p`) or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub mode: Mode,
    /// `p_0 = 1`.
    pub a: bool,
    pub b: Consistency,
    /// `p_i·8^{s_i} ∈ ℕ`, by index `i`.
    pub c: Check,
    /// `(1 − p_{i+1})·8^{S_i} ≥ 7^{S_i}`, by index `i`.
    pub d: Check,
    /// `3·8^{S_i} ≤ s_{i+1}`, by index `i`.
    pub e: Check,
}

impl ValidationReport {
    /// Whether the schedule is acceptable in the requested mode.
    pub fn is_valid(&self) -> bool {
        let base = self.a && self.b == Consistency::Consistent && self.c.holds();
        match self.mode {
            Mode::Relaxed => base,
            Mode::Strict => base && self.d.holds() && self.e.holds(),
        }
    }
}

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

impl Schedule {
    /// Builds a schedule. Shape is checked here; the growth conditions are
    /// left to [`Schedule::validate`].
    pub fn new(p_target: BigRational, p: Vec<BigRational>, s: Vec<BigUint>) -> Result<Self, SpongeError> {
        if p.is_empty() || p.len() != s.len() {
            return Err(SpongeError::Shape(format!(
                "need equally long non-empty p and s lists, got {} and {}",
                p.len(),
                s.len()
            )));
        }
        if !p_target.is_positive() || p_target > BigRational::one() {
            return Err(SpongeError::Shape(format!("p_target {p_target} not in (0,1]")));
        }
        if let Some(bad) = p.iter().find(|x| !x.is_positive() || **x > BigRational::one()) {
            return Err(SpongeError::Shape(format!("p value {bad} not in (0,1]")));
        }
        Ok(Self { p_target, p, s })
    }

    /// Small schedules from machine integers: `p_i = num_i/den_i`, and
    /// `p_target` is taken to be the last partial product.
    pub fn toy(p: &[(i64, i64)], s: &[u64]) -> Result<Self, SpongeError> {
        let pv: Vec<BigRational> = p.iter().map(|&(a, b)| ratio(a, b)).collect();
        let target = pv.iter().fold(BigRational::one(), |acc, x| acc * x);
        Self::new(target, pv, s.iter().map(|&x| BigUint::from(x)).collect())
    }

    /// `s = (1, 24, 3·8^25)`, `p = (1, 1/16, 1/2)`, `p_target = 1/32`: the
    /// smallest prefix meeting the growth conditions with equality in (e).
    pub fn strict_example() -> Self {
        let s2 = BigUint::from(3u32) * BigUint::from(8u32).pow(25);
        Self::new(
            ratio(1, 32),
            vec![ratio(1, 1), ratio(1, 16), ratio(1, 2)],
            vec![BigUint::one(), BigUint::from(24u32), s2],
        )
        .expect("valid shape")
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn p_target(&self) -> &BigRational {
        &self.p_target
    }

    pub fn p(&self, i: usize) -> &BigRational {
        &self.p[i]
    }

    pub fn s(&self, i: usize) -> &BigUint {
        &self.s[i]
    }

    pub fn p_values(&self) -> &[BigRational] {
        &self.p
    }

    pub fn s_values(&self) -> &[BigUint] {
        &self.s
    }

    /// `P_i = p_0·…·p_i`.
    pub fn big_p(&self, i: usize) -> BigRational {
        self.p[..=i].iter().fold(BigRational::one(), |acc, x| acc * x)
    }

    /// `S_i = s_0 + … + s_i`.
    pub fn big_s(&self, i: usize) -> BigUint {
        self.s[..=i].iter().sum()
    }

    /// `S_i` as a level, if small enough to materialize.
    pub fn level(&self, i: usize) -> Option<u32> {
        self.big_s(i).to_u32().filter(|&l| l <= crate::dyadic::MAX_LEVEL)
    }

    /// Exact number of cubes `P_i·8^{S_i}` in the `i`-th complex.
    pub fn cube_count(&self, i: usize) -> Option<BigUint> {
        BigCount::scaled(&self.big_p(i), &(self.big_s(i) * 3u32))
            .and_then(|c| c.materialize())
    }

    /// Checks conditions (a)-(e) on this finite prefix.
    pub fn validate(&self, mode: Mode) -> ValidationReport {
        let one = BigRational::one();
        let a = self.p[0] == one;

        let mut b = Consistency::Consistent;
        let mut prod = one.clone();
        for (i, p) in self.p.iter().enumerate() {
            prod *= p;
            // p ≤ 1 makes the products non-increasing; they must stay ≥ p_target.
            if prod < self.p_target {
                b = Consistency::Inconsistent { index: i };
                break;
            }
        }

        let mut c = Check::default();
        for (i, (p, s)) in self.p.iter().zip(&self.s).enumerate() {
            let ok = BigCount::pow8(s).mul_rational(p).is_some();
            c.record(i, Some(ok));
        }

        let mut d = Check::default();
        let mut e = Check::default();
        for i in 0..self.len() - 1 {
            let big_s = self.big_s(i);
            let exp = BigInt::from(big_s.clone()) * 3;
            let mut t = TermSum::single(&(&one - &self.p[i + 1]), Atom::One, &exp);
            t.push(-one.clone(), Atom::Pow { base: 7, exp: big_s }, BigInt::zero());
            d.record(i, certified_nonneg(&t));

            let mut t = TermSum::constant(&BigRational::from_integer(BigInt::from(self.s[i + 1].clone())));
            t.push(ratio(-3, 1), Atom::One, exp);
            e.record(i, certified_nonneg(&t));
        }

        ValidationReport { mode, a, b, c, d, e }
    }

    /// Symbolic logrange of the `depth`-th complex:
    /// `Σ_{i<depth} m_i · log₂ C(8^{s_{i+1}}, p_{i+1}·8^{s_{i+1}})`.
    pub fn logrange_terms(&self, depth: usize) -> Result<TermSum, SpongeError> {
        let mut total = TermSum::new();
        for i in 0..depth.min(self.len().saturating_sub(1)) {
            let m = BigCount::scaled(&self.big_p(i), &(self.big_s(i) * 3u32))
                .ok_or_else(|| SpongeError::Shape(format!("P_{i}·8^S_{i} is not an integer")))?;
            total = total.add(&entropy::logrange_step_terms(&m, &self.s[i + 1], &self.p[i + 1])?);
        }
        Ok(total)
    }
}

/// `Some(true)` if certainly `≥ 0`, `Some(false)` if certainly `< 0`.
fn certified_nonneg(t: &TermSum) -> Option<bool> {
    match t.sign()? {
        entropy::Sign::Negative => Some(false),
        _ => Some(true),
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p_target={}", self.p_target)?;
        for (i, (p, s)) in self.p.iter().zip(&self.s).enumerate() {
            write!(f, " [{i}: p={p} s={s}]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_c_arithmetic() {
        let s = Schedule::toy(&[(1, 1), (1, 3)], &[1, 1]).unwrap();
        let r = s.validate(Mode::Relaxed);
        assert_eq!(r.c.failures, vec![1]);
        assert!(!r.is_valid());
    }

    #[test]
    fn relaxed_but_not_strict() {
        let s = Schedule::toy(&[(1, 1), (1, 2)], &[1, 1]).unwrap();
        assert!(s.validate(Mode::Relaxed).is_valid());
        let strict = s.validate(Mode::Strict);
        assert!(!strict.is_valid());
        assert_eq!(strict.e.failures, vec![0]);
        // (1/2)·8 = 4 < 7
        assert_eq!(strict.d.failures, vec![0]);
    }

    #[test]
    fn strict_example_passes() {
        let s = Schedule::strict_example();
        let r = s.validate(Mode::Strict);
        assert!(r.is_valid(), "{r:?}");
        assert_eq!(s.big_s(1), BigUint::from(25u32));
        assert_eq!(s.big_p(2), ratio(1, 32));
        assert!(s.level(2).is_none());
    }

    #[test]
    fn condition_b_prefix() {
        let s = Schedule::new(ratio(1, 4), vec![ratio(1, 1), ratio(1, 8)], vec![BigUint::one(); 2]).unwrap();
        assert_eq!(s.validate(Mode::Relaxed).b, Consistency::Inconsistent { index: 1 });
    }

    #[test]
    fn counts() {
        let s = Schedule::toy(&[(1, 1), (1, 2), (3, 4)], &[1, 1, 1]).unwrap();
        assert_eq!(s.cube_count(0).unwrap(), BigUint::from(8u32));
        assert_eq!(s.cube_count(1).unwrap(), BigUint::from(32u32));
        assert_eq!(s.cube_count(2).unwrap(), BigUint::from(192u32));
    }
}
