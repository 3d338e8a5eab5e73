use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{pi, Interval};
use super::logq::{LogQuantity, Sign};

/// Real-valued building blocks of a symbolic sum.
///
/// Atoms are kept in a normal form so that equal quantities written in
/// different ways cancel exactly: powers of two always move into the term's
/// binary exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    One,
    /// Binary entropy `h(p)` with `0 < p < 1/2`.
    Entropy(BigRational),
    /// `log₂ x` for a positive `x ≠ 1` with odd numerator and denominator.
    Log2(BigRational),
    Log2Pi,
    /// `base^exp` with odd `base > 1` and `exp > 0`.
    Pow { base: u32, exp: BigUint },
}

/// Powers whose value has at most this many bits are expanded.
const SMALL_POW_BITS: u64 = 4096;

fn two_adic(v: &BigInt) -> u64 {
    v.trailing_zeros().unwrap_or(0)
}

/// Splits `r ≠ 0` as `odd · 2^k`.
fn split_pow2(r: &BigRational) -> (BigRational, BigInt) {
    let a = two_adic(r.numer());
    let b = two_adic(r.denom());
    let odd = BigRational::new(r.numer() >> a, r.denom() >> b);
    (odd, BigInt::from(a) - BigInt::from(b))
}

/// Binary entropy of an exact probability, as an interval.
pub fn entropy_interval(p: &BigRational) -> Interval {
    if p.is_zero() || p.is_one() {
        return Interval::zero();
    }
    let pi_ = Interval::from_rational(p);
    let qi = Interval::from_rational(&(BigRational::one() - p));
    pi_.mul(&pi_.log2()).add(&qi.mul(&qi.log2())).neg()
}

impl Atom {
    /// Certified value as sign plus log magnitude.
    fn evaluate(&self) -> Option<LogQuantity> {
        match self {
            Atom::One => Some(LogQuantity::from_log2(Sign::Positive, Interval::zero())),
            Atom::Entropy(p) => LogQuantity::from_interval(&entropy_interval(p)),
            Atom::Log2(x) => LogQuantity::from_interval(&Interval::from_rational(x).log2()),
            Atom::Log2Pi => LogQuantity::from_interval(&pi().log2()),
            Atom::Pow { base, exp } => {
                let lb = Interval::from_int(*base).log2();
                Some(LogQuantity::from_log2(
                    Sign::Positive,
                    lb.mul_int(&BigInt::from(exp.clone())),
                ))
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::One => write!(f, "1"),
            Atom::Entropy(p) => write!(f, "h({p})"),
            Atom::Log2(x) => write!(f, "log2({x})"),
            Atom::Log2Pi => write!(f, "log2(pi)"),
            Atom::Pow { base, exp } => write!(f, "{base}^{exp}"),
        }
    }
}

/// An exact symbolic sum `Σ cᵢ · atomᵢ · 2^eᵢ` plus an interval of slack.
///
/// Coefficients are rationals with odd numerator and denominator and the
/// exponents are unbounded integers, so terms like `8^(3·8^25) · h(1/2)`
/// are representable and cancel exactly against each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSum {
    terms: BTreeMap<(Atom, BigInt), BigRational>,
    slack: Interval,
}

impl Default for TermSum {
    fn default() -> Self {
        Self::new()
    }
}

impl TermSum {
    pub fn new() -> Self {
        Self {
            terms: BTreeMap::new(),
            slack: Interval::zero(),
        }
    }

    pub fn constant(c: &BigRational) -> Self {
        let mut s = Self::new();
        s.push(c.clone(), Atom::One, BigInt::zero());
        s
    }

    pub fn single(coeff: &BigRational, atom: Atom, exp2: &BigInt) -> Self {
        let mut s = Self::new();
        s.push(coeff.clone(), atom, exp2.clone());
        s
    }

    pub fn slack_only(slack: Interval) -> Self {
        Self {
            terms: BTreeMap::new(),
            slack,
        }
    }

    /// Adds `coeff · atom · 2^exp2`, normalizing the atom.
    pub fn push(&mut self, coeff: BigRational, atom: Atom, exp2: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match atom {
            Atom::One => self.push_raw(coeff, Atom::One, exp2),
            Atom::Log2Pi => self.push_raw(coeff, Atom::Log2Pi, exp2),
            Atom::Entropy(p) => {
                assert!(!p.is_negative() && p <= BigRational::one(), "probability out of range");
                if p.is_zero() || p.is_one() {
                    return;
                }
                let half = BigRational::new(BigInt::one(), BigInt::from(2));
                let p = if p > half { BigRational::one() - p } else { p };
                if p == half {
                    self.push_raw(coeff, Atom::One, exp2);
                } else {
                    self.push_raw(coeff, Atom::Entropy(p), exp2);
                }
            }
            Atom::Log2(x) => {
                assert!(x.is_positive(), "log of a non-positive number");
                let (odd, k) = split_pow2(&x);
                if !k.is_zero() {
                    self.push(&coeff * BigRational::from_integer(k), Atom::One, exp2.clone());
                }
                if !odd.is_one() {
                    self.push_raw(coeff, Atom::Log2(odd), exp2);
                }
            }
            Atom::Pow { base, exp } => {
                assert!(base > 0, "zero base");
                let a = base.trailing_zeros();
                let odd = base >> a;
                let exp2 = exp2 + BigInt::from(exp.clone()) * BigInt::from(a);
                if odd == 1 || exp.is_zero() {
                    self.push_raw(coeff, Atom::One, exp2);
                } else if let Some(e) = exp.to_u32().filter(|e| u64::from(*e) * 32 <= SMALL_POW_BITS) {
                    // small powers become exact integers so they cancel like numbers
                    let v = BigInt::from(odd).pow(e);
                    self.push_raw(coeff * BigRational::from_integer(v), Atom::One, exp2);
                } else {
                    self.push_raw(coeff, Atom::Pow { base: odd, exp }, exp2);
                }
            }
        }
    }

    fn push_raw(&mut self, coeff: BigRational, atom: Atom, exp2: BigInt) {
        let (mut odd, k) = split_pow2(&coeff);
        let mut key = (atom, exp2 + k);
        // Merging can produce an even coefficient; renormalize until stable.
        while let Some(old) = self.terms.remove(&key) {
            let sum = old + &odd;
            if sum.is_zero() {
                return;
            }
            let (o, k) = split_pow2(&sum);
            odd = o;
            key.1 += k;
        }
        self.terms.insert(key, odd);
    }

    pub fn add_slack(&mut self, slack: &Interval) {
        self.slack = self.slack.add(slack);
    }

    pub fn slack(&self) -> &Interval {
        &self.slack
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// No symbolic terms and zero slack.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.slack.is_point() && self.slack.lo().is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((atom, e), c) in &other.terms {
            out.push_raw(c.clone(), atom.clone(), e.clone());
        }
        out.slack = out.slack.add(&other.slack);
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
            slack: self.slack.neg(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplies every term by `coeff · 2^exp2`. The slack is scaled too,
    /// which needs `exp2` to fit a machine word when the slack is non-zero.
    pub fn scale(&self, coeff: &BigRational, exp2: &BigInt) -> Self {
        let mut out = Self::new();
        if coeff.is_zero() {
            return out;
        }
        for ((atom, e), c) in &self.terms {
            out.push_raw(c * coeff, atom.clone(), e + exp2);
        }
        if !(self.slack.is_point() && self.slack.lo().is_zero()) {
            let k = exp2.to_i64().expect("slack scaling exponent out of range");
            out.slack = self.slack.mul_rational(coeff).scale_pow2(k);
        }
        out
    }

    /// Lower and upper enclosures of the value, or `None` if the terms
    /// could not be summed with a certain sign.
    pub fn bounds(&self) -> Option<(LogQuantity, LogQuantity)> {
        let mut pos = LogQuantity::zero();
        let mut neg = LogQuantity::zero();
        for ((atom, e), c) in &self.terms {
            let coeff = LogQuantity::from_rational(c);
            let scaled = LogQuantity::from_log2(
                coeff.sign(),
                coeff.log2_abs()?.add(&Interval::from_int(e.clone())),
            );
            let term = scaled.mul(&atom.evaluate()?);
            match term.sign() {
                Sign::Positive => pos = pos.checked_add(&term)?,
                Sign::Negative => neg = neg.checked_add(&term)?,
                Sign::Zero => {}
            }
        }
        let core = pos.checked_add(&neg)?;
        let lo = LogQuantity::from_interval(&Interval::point(self.slack.lo().clone()))?;
        let hi = LogQuantity::from_interval(&Interval::point(self.slack.hi().clone()))?;
        Some((core.checked_add(&lo)?, core.checked_add(&hi)?))
    }

    /// Certified sign of the value.
    pub fn sign(&self) -> Option<Sign> {
        if self.is_exact_zero() {
            return Some(Sign::Zero);
        }
        let (lo, hi) = self.bounds()?;
        if lo.sign() == Sign::Positive {
            Some(Sign::Positive)
        } else if hi.sign() == Sign::Negative {
            Some(Sign::Negative)
        } else if lo.sign() == Sign::Zero && hi.sign() == Sign::Zero {
            Some(Sign::Zero)
        } else {
            None
        }
    }

    /// Certainly `≥ 0`.
    pub fn certainly_nonneg(&self) -> bool {
        if self.is_exact_zero() {
            return true;
        }
        matches!(self.bounds(), Some((lo, _)) if lo.sign() != Sign::Negative)
    }

    /// Certainly `> 0`.
    pub fn certainly_positive(&self) -> bool {
        self.sign() == Some(Sign::Positive)
    }

    /// A single enclosure, when both ends share a sign.
    pub fn to_log_quantity(&self) -> Option<LogQuantity> {
        if self.is_exact_zero() {
            return Some(LogQuantity::zero());
        }
        let (lo, hi) = self.bounds()?;
        lo.hull(&hi)
    }

    /// Linear enclosure, when every term is of moderate size.
    pub fn to_interval(&self) -> Option<Interval> {
        let (lo, hi) = self.bounds()?;
        let l = lo.value()?;
        let h = hi.value()?;
        Some(Interval::new(l.lo().clone(), h.hi().clone()))
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "{}", self.slack);
        }
        for (i, ((atom, e), c)) in self.terms.iter().enumerate() {
            let sep = if i == 0 { "" } else { " + " };
            write!(f, "{sep}({c})")?;
            if !e.is_zero() {
                write!(f, "*2^{e}")?;
            }
            if *atom != Atom::One {
                write!(f, "*{atom}")?;
            }
        }
        if !(self.slack.is_point() && self.slack.lo().is_zero()) {
            write!(f, " + {}", self.slack)?;
        }
        Ok(())
    }
}

/// Shorthand for `a/b` as a [`BigRational`].
pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `n` with its power of two split off, `n = odd · 2^shift`, so that counts
/// such as `8^(3·8^25)` can be handled without materializing them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigCount {
    odd: BigUint,
    shift: BigUint,
}

/// Counts below `2^MATERIALIZE_BITS` are expanded when exact arithmetic helps.
pub(crate) const MATERIALIZE_BITS: u64 = 1 << 16;

impl BigCount {
    pub fn new(n: &BigUint) -> Self {
        assert!(!n.is_zero(), "count must be positive");
        let tz = n.trailing_zeros().unwrap_or(0);
        Self {
            odd: n >> tz,
            shift: BigUint::from(tz),
        }
    }

    /// `8^s`.
    pub fn pow8(s: &BigUint) -> Self {
        Self {
            odd: BigUint::one(),
            shift: s * 3u32,
        }
    }

    /// `r · 2^shift` for a dyadic `r > 0`; `None` if the result is not a
    /// positive integer.
    pub fn scaled(r: &BigRational, shift: &BigUint) -> Option<Self> {
        if !r.is_positive() {
            return None;
        }
        let (odd, k) = split_pow2(r);
        if !odd.denom().is_one() {
            return None;
        }
        let total = BigInt::from(shift.clone()) + k;
        if total.is_negative() {
            return None;
        }
        Some(Self {
            odd: odd.numer().magnitude().clone(),
            shift: total.magnitude().clone(),
        })
    }

    pub fn odd(&self) -> &BigUint {
        &self.odd
    }

    pub fn shift(&self) -> &BigUint {
        &self.shift
    }

    /// Upper bound on the bit length.
    pub fn bits_upper(&self) -> BigUint {
        &self.shift + self.odd.bits()
    }

    pub fn materialize(&self) -> Option<BigUint> {
        let s = self.shift.to_u64()?;
        (s + self.odd.bits() <= MATERIALIZE_BITS).then(|| &self.odd << s)
    }

    /// `c · n` as a [`TermSum`] coefficient pair `(c·odd, shift)`.
    pub fn as_coeff(&self, c: &BigRational) -> (BigRational, BigInt) {
        (
            c * BigRational::from_integer(BigInt::from(self.odd.clone())),
            BigInt::from(self.shift.clone()),
        )
    }

    /// `log₂ n` as a sum.
    pub fn log2_terms(&self) -> TermSum {
        let mut t = TermSum::constant(&BigRational::from_integer(BigInt::from(self.shift.clone())));
        t.push(
            BigRational::one(),
            Atom::Log2(BigRational::from_integer(BigInt::from(self.odd.clone()))),
            BigInt::zero(),
        );
        t
    }

    /// `r · n` when it is an integer.
    pub fn mul_rational(&self, r: &BigRational) -> Option<Self> {
        let v = BigRational::from_integer(BigInt::from(self.odd.clone())) * r;
        Self::scaled(&v, &self.shift)
    }

    pub fn is_even(&self) -> bool {
        !self.shift.is_zero() || self.odd.is_even()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_cancels() {
        let mut a = TermSum::new();
        a.push(ratio(3, 1), Atom::Pow { base: 6, exp: BigUint::from(5u32) }, BigInt::zero());
        // 3·6^5 = 3·3^5·2^5
        let mut b = TermSum::new();
        b.push(ratio(6, 1), Atom::Pow { base: 3, exp: BigUint::from(5u32) }, BigInt::from(4));
        assert!(a.sub(&b).is_exact_zero());
        let mut e = TermSum::new();
        e.push(ratio(1, 1), Atom::Entropy(ratio(15, 16)), BigInt::zero());
        e.push(ratio(-1, 1), Atom::Entropy(ratio(1, 16)), BigInt::zero());
        assert!(e.is_exact_zero());
        let mut l = TermSum::new();
        l.push(ratio(1, 1), Atom::Log2(ratio(24, 1)), BigInt::zero());
        l.push(ratio(-3, 1), Atom::One, BigInt::zero());
        l.push(ratio(-1, 1), Atom::Log2(ratio(3, 1)), BigInt::zero());
        assert!(l.is_exact_zero());
    }

    #[test]
    fn evaluation_matches_floats() {
        let mut t = TermSum::new();
        t.push(ratio(5, 2), Atom::Entropy(ratio(1, 4)), BigInt::from(3));
        t.push(ratio(-1, 1), Atom::Log2Pi, BigInt::zero());
        let want = 2.5 * 8.0 * (-(0.25f64 * 0.25f64.log2()) - 0.75 * 0.75f64.log2())
            - std::f64::consts::PI.log2();
        let v = t.to_interval().unwrap();
        assert!((v.mid_f64() - want).abs() < 1e-12);
        assert_eq!(t.sign(), Some(Sign::Positive));
    }

    #[test]
    fn tower_sized_terms() {
        // 8^(3·8^25) − 7^(3·8^25) > 0
        let s = BigUint::from(3u32) * BigUint::from(8u32).pow(25);
        let mut t = TermSum::new();
        t.push(ratio(1, 1), Atom::Pow { base: 8, exp: s.clone() }, BigInt::zero());
        t.push(ratio(-1, 1), Atom::Pow { base: 7, exp: s }, BigInt::zero());
        assert_eq!(t.term_count(), 2);
        assert_eq!(t.sign(), Some(Sign::Positive));
        let c = BigCount::pow8(&BigUint::from(3u32));
        assert_eq!(c.materialize().unwrap(), BigUint::from(512u32));
        assert_eq!(BigCount::scaled(&ratio(1, 16), &BigUint::from(3u32)), None);
        assert_eq!(
            BigCount::scaled(&ratio(3, 16), &BigUint::from(6u32)).unwrap().materialize().unwrap(),
            BigUint::from(12u32)
        );
    }
}
