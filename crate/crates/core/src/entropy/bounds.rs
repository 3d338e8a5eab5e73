use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::binom::binomial;
use super::interval::{Dy, Interval};
use super::logq::{LogQuantity, Sign};
use super::terms::{entropy_interval, Atom, BigCount, TermSum};
use super::EntropyError;

/// Below this `n`, binomials are computed exactly.
pub const EXACT_BINOMIAL_LIMIT: u64 = 1_000_000;

/// Cap on the certified exponent of the crude Stirling remainder.
const CRUDE_SLACK_EXP_CAP: u64 = 1 << 40;

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn one() -> BigRational {
    BigRational::one()
}

fn check_probability(p: &BigRational) -> Result<(), EntropyError> {
    if p.is_negative() || *p > one() {
        return Err(EntropyError::OutOfRange(format!("probability {p} not in [0,1]")));
    }
    Ok(())
}

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy(p: &BigRational) -> Result<LogQuantity, EntropyError> {
    check_probability(p)?;
    Ok(LogQuantity::from_interval(&entropy_interval(p)).expect("entropy has a certain sign"))
}

/// `α · n` as a count, checking integrality.
fn alpha_times(n: &BigCount, alpha: &BigRational) -> Result<Option<BigCount>, EntropyError> {
    check_probability(alpha)?;
    if alpha.is_zero() {
        return Ok(None);
    }
    n.mul_rational(alpha)
        .map(Some)
        .ok_or_else(|| EntropyError::NotIntegral(format!("{alpha}·n")))
}

/// Exact `log₂ C(n, k)` as a single atom.
fn exact_log_binomial_terms(n: u64, k: u64) -> TermSum {
    let c = binomial(n, k);
    TermSum::single(&one(), Atom::Log2(int(BigInt::from(c))), &BigInt::zero())
}

/// Robbins bracket `1/(12m+1) < r_m < 1/(12m)` of the Stirling remainder.
fn robbins(m: &BigUint) -> (BigRational, BigRational) {
    let twelve_m = BigInt::from(m.clone()) * 12;
    (
        BigRational::new(BigInt::one(), &twelve_m + 1),
        BigRational::new(BigInt::one(), twelve_m),
    )
}

/// `log₂ C(n, αn)` as a symbolic sum with certified slack.
///
/// Exact for `n` below [`EXACT_BINOMIAL_LIMIT`]; otherwise Stirling's formula
/// with Robbins' remainder:
/// `log₂ C = n·h(α) − ½·log₂(2π·n·α(1−α)) + (r_n − r_k − r_{n−k})/ln 2`.
pub fn log_binomial_terms(n: &BigCount, alpha: &BigRational) -> Result<TermSum, EntropyError> {
    let k = match alpha_times(n, alpha)? {
        None => return Ok(TermSum::new()),
        Some(k) => k,
    };
    if *alpha == one() {
        return Ok(TermSum::new());
    }
    if let Some(nv) = n.materialize().and_then(|v| v.to_u64()) {
        if nv < EXACT_BINOMIAL_LIMIT {
            let kv = k.materialize().and_then(|v| v.to_u64()).expect("k ≤ n");
            return Ok(exact_log_binomial_terms(nv, kv));
        }
    }
    let beta = one() - alpha;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (c, e) = n.as_coeff(&one());
    let mut t = TermSum::single(&c, Atom::Entropy(alpha.clone()), &e);
    t.push(-&half, Atom::One, BigInt::zero());
    t.push(-&half, Atom::Log2Pi, BigInt::zero());
    t = t.sub(&n.log2_terms().scale(&half, &BigInt::zero()));
    t.push(-&half, Atom::Log2(alpha.clone()), BigInt::zero());
    t.push(-&half, Atom::Log2(beta.clone()), BigInt::zero());
    t.add_slack(&stirling_slack(n, &k, alpha));
    Ok(t)
}

/// Enclosure of `(r_n − r_k − r_{n−k}) / ln 2`.
fn stirling_slack(n: &BigCount, k: &BigCount, alpha: &BigRational) -> Interval {
    if let (Some(nv), Some(kv)) = (n.materialize(), k.materialize()) {
        let rest = &nv - &kv;
        let (n_lo, n_hi) = robbins(&nv);
        let (k_lo, k_hi) = robbins(&kv);
        let (r_lo, r_hi) = robbins(&rest);
        let lo = n_lo - k_hi - r_hi;
        let hi = n_hi - k_lo - r_lo;
        let ln2 = Interval::from_int(2).ln();
        let lo = Interval::from_rational(&lo).div(&ln2);
        let hi = Interval::from_rational(&hi).div(&ln2);
        return Interval::new(lo.lo().clone(), hi.hi().clone());
    }
    // min(k, n−k) ≥ n/den(α) ≥ 2^b, and |r_n − r_k − r_{n−k}|/ln 2 < 1/(2·min).
    let bits = n.bits_upper() - 1u32;
    let den_bits = alpha.denom().bits();
    let b = bits.to_u64().unwrap_or(u64::MAX).saturating_sub(den_bits).min(CRUDE_SLACK_EXP_CAP);
    let eps = Dy::pow2(-(b as i64) - 1);
    let e = Interval::point(eps);
    e.neg().hull(&e)
}

/// `log₂ C(n, k)`, returned as a quantity whose value is the logarithm.
pub fn log_binomial(n: &BigUint, k: &BigUint) -> Result<LogQuantity, EntropyError> {
    if k > n {
        return Err(EntropyError::KExceedsN);
    }
    if k.is_zero() || k == n {
        return Ok(LogQuantity::zero());
    }
    let alpha = BigRational::new(BigInt::from(k.clone()), BigInt::from(n.clone()));
    log_binomial_terms(&BigCount::new(n), &alpha)?
        .to_log_quantity()
        .ok_or(EntropyError::Uncertain)
}

/// `2^{h(α)n}/n ≤ C(n, αn) ≤ 2^{h(α)n}`, certified.
pub fn check_newton(n: &BigUint, alpha: &BigRational) -> Result<bool, EntropyError> {
    if n.is_zero() {
        return Err(EntropyError::OutOfRange("n must be positive".into()));
    }
    let count = BigCount::new(n);
    let lc = log_binomial_terms(&count, alpha)?;
    let (c, e) = count.as_coeff(&one());
    let nh = TermSum::single(&c, Atom::Entropy(alpha.clone()), &e);
    let upper = nh.sub(&lc);
    let lower = lc.sub(&nh).add(&count.log2_terms());
    Ok(upper.certainly_nonneg() && lower.certainly_nonneg())
}

/// `log₂(n·α(1−α))` as a sum.
fn log_variance_terms(n: &BigCount, alpha: &BigRational) -> TermSum {
    let mut t = n.log2_terms();
    t.push(one(), Atom::Log2(alpha.clone()), BigInt::zero());
    t.push(one(), Atom::Log2(one() - alpha), BigInt::zero());
    t
}

/// Both Feller bounds `G/(2√2) ≤ C(n, αn) ≤ G/√(2π)` with
/// `G = 2^{h(α)n}/√(nα(1−α))`, certified.
pub fn check_prenewton(n: &BigUint, alpha: &BigRational) -> Result<bool, EntropyError> {
    if !alpha.is_positive() || *alpha >= one() {
        return Err(EntropyError::OutOfRange(format!("alpha {alpha} not in (0,1)")));
    }
    if n.is_zero() {
        return Err(EntropyError::OutOfRange("n must be positive".into()));
    }
    let count = BigCount::new(n);
    let lc2 = log_binomial_terms(&count, alpha)?.scale(&int(2), &BigInt::zero());
    let (c, e) = count.as_coeff(&int(2));
    let two_nh = TermSum::single(&c, Atom::Entropy(alpha.clone()), &e);
    let var = log_variance_terms(&count, alpha);
    // 2·log₂C − 2nh + log₂(nα(1−α)) + 3 ≥ 0
    let lower = lc2.sub(&two_nh).add(&var).add(&TermSum::constant(&int(3)));
    // 2nh − log₂(nα(1−α)) − 1 − log₂π − 2·log₂C ≥ 0
    let mut upper = two_nh.sub(&var).sub(&lc2);
    upper.push(-one(), Atom::One, BigInt::zero());
    upper.push(-one(), Atom::Log2Pi, BigInt::zero());
    Ok(lower.certainly_nonneg() && upper.certainly_nonneg())
}

/// `h((q−α)/(1−α))·(1−α) ≤ h(q) − (1−q)·α`, certified.
pub fn check_ediff(q: &BigRational, alpha: &BigRational) -> Result<bool, EntropyError> {
    if !q.is_positive() || *q >= one() {
        return Err(EntropyError::OutOfRange(format!("q {q} not in (0,1)")));
    }
    if alpha.is_negative() || alpha > q {
        return Err(EntropyError::OutOfRange(format!("alpha {alpha} not in [0,q]")));
    }
    let rest = one() - alpha;
    let mut t = TermSum::new();
    t.push(one(), Atom::Entropy(q.clone()), BigInt::zero());
    t.push(-(one() - q) * alpha, Atom::One, BigInt::zero());
    t.push(-rest.clone(), Atom::Entropy((q - alpha) / &rest), BigInt::zero());
    Ok(t.certainly_nonneg())
}

fn check_step(s_next: &BigUint, p_next: &BigRational) -> Result<BigCount, EntropyError> {
    check_probability(p_next)?;
    let n = BigCount::pow8(s_next);
    if !p_next.is_zero() && n.mul_rational(p_next).is_none() {
        return Err(EntropyError::NotIntegral(format!("{p_next}·8^{s_next}")));
    }
    Ok(n)
}

/// `m · log₂ C(8^s, p·8^s)` as a sum, with `m = m_coeff · 2^m_shift`.
pub fn logrange_step_terms(
    m: &BigCount,
    s_next: &BigUint,
    p_next: &BigRational,
) -> Result<TermSum, EntropyError> {
    let n = check_step(s_next, p_next)?;
    let lc = log_binomial_terms(&n, p_next)?;
    let (c, e) = m.as_coeff(&one());
    Ok(lc.scale(&c, &e))
}

/// `m · log₂ C(8^s, p·8^s)`: the logrange added by one generation step over
/// `m` parent cubes.
pub fn logrange_step(
    m: &BigUint,
    s_next: &BigUint,
    p_next: &BigRational,
) -> Result<LogQuantity, EntropyError> {
    check_step(s_next, p_next)?;
    if m.is_zero() {
        return Ok(LogQuantity::zero());
    }
    logrange_step_terms(&BigCount::new(m), s_next, p_next)?
        .to_log_quantity()
        .ok_or(EntropyError::Uncertain)
}

fn entropy_mass(big_p: &BigRational, p_next: &BigRational, s_next: &BigUint) -> TermSum {
    TermSum::single(
        big_p,
        Atom::Entropy(p_next.clone()),
        &(BigInt::from(s_next.clone()) * 3),
    )
}

/// `P·h(p)·8^S − S²`.
pub fn prop32_increment_terms(big_p: &BigRational, p_next: &BigRational, s_next: &BigUint) -> TermSum {
    let s = BigInt::from(s_next.clone());
    entropy_mass(big_p, p_next, s_next).sub(&TermSum::constant(&int(&s * &s)))
}

/// `P·h(p)·8^S − 6^S`.
pub fn prop38_increment_terms(big_p: &BigRational, p_next: &BigRational, s_next: &BigUint) -> TermSum {
    let six = TermSum::single(&one(), Atom::Pow { base: 6, exp: s_next.clone() }, &BigInt::zero());
    entropy_mass(big_p, p_next, s_next).sub(&six)
}

pub fn prop32_lower_bound(
    big_p: &BigRational,
    p_next: &BigRational,
    s_next: &BigUint,
) -> Result<LogQuantity, EntropyError> {
    check_probability(p_next)?;
    prop32_increment_terms(big_p, p_next, s_next)
        .to_log_quantity()
        .ok_or(EntropyError::Uncertain)
}

pub fn prop38_upper_bound(
    big_p: &BigRational,
    p_next: &BigRational,
    s_next: &BigUint,
) -> Result<LogQuantity, EntropyError> {
    check_probability(p_next)?;
    prop38_increment_terms(big_p, p_next, s_next)
        .to_log_quantity()
        .ok_or(EntropyError::Uncertain)
}

/// Certified `logrange_step ≥ P·h(p)·8^S − S²` for one step, where the
/// step acts on `m = P_i · 8^{S_i}` cubes.
pub fn step_dominates_prop32(
    big_p: &BigRational,
    s_cur: &BigUint,
    s_next_step: &BigUint,
    p_next: &BigRational,
) -> Result<bool, EntropyError> {
    let m = BigCount::scaled(big_p, &(s_cur * 3u32))
        .ok_or_else(|| EntropyError::NotIntegral(format!("{big_p}·8^{s_cur}")))?;
    let step = logrange_step_terms(&m, s_next_step, p_next)?;
    let s_next = s_cur + s_next_step;
    let diff = step.sub(&prop32_increment_terms(big_p, p_next, &s_next));
    Ok(diff.certainly_nonneg())
}

/// `16T + S + 144 − (p/2^{S+1})·7^T + 6^T`, which must be `≤ 0`.
pub fn i0_terms(s: &BigUint, p: &BigRational, t: &BigUint) -> TermSum {
    let tb = BigInt::from(t.clone());
    let sb = BigInt::from(s.clone());
    let c: BigInt = tb * 16 + &sb + 144;
    let mut x = TermSum::constant(&int(c));
    x.push(-p.clone(), Atom::Pow { base: 7, exp: t.clone() }, -(sb + BigInt::one()));
    x.push(one(), Atom::Pow { base: 6, exp: t.clone() }, BigInt::zero());
    x
}

/// `6^T − 5^T − T²`, which must be `≥ 0`.
pub fn margin_terms(t: &BigUint) -> TermSum {
    let tb = BigInt::from(t.clone());
    let mut x = TermSum::single(&one(), Atom::Pow { base: 6, exp: t.clone() }, &BigInt::zero());
    x.push(-one(), Atom::Pow { base: 5, exp: t.clone() }, BigInt::zero());
    x.push(-int(&tb * &tb), Atom::One, BigInt::zero());
    x
}

/// Outcome of scanning a schedule prefix for the threshold index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct I0Report {
    /// Per step `i`: whether the threshold inequality is certified at `S_{i+1}`.
    pub holds: Vec<bool>,
    /// Per step `i`: whether `−6^T + T² ≤ −5^T` is certified at `T = S_{i+1}`.
    pub margin: Vec<bool>,
    /// Least `i` where the inequality holds, if any within the prefix.
    pub index: Option<usize>,
}

/// Scans `S_1, S_2, …` (given as `s_next[i] = S_{i+1}`) for the least `i`
/// where `16·S_{i+1} + S + 144 − (p/2^{S+1})·7^{S_{i+1}} ≤ −6^{S_{i+1}}`.
pub fn find_i0(s: &BigUint, p: &BigRational, s_next: &[BigUint]) -> I0Report {
    let holds: Vec<bool> = s_next
        .iter()
        .map(|t| i0_terms(s, p, t).neg().certainly_nonneg())
        .collect();
    let margin = s_next.iter().map(|t| margin_terms(t).certainly_nonneg()).collect();
    let index = holds.iter().position(|&h| h);
    I0Report { holds, margin, index }
}

/// Largest `S_i` for which `5^{S_i}` is expanded into a certified exponent.
pub const PROBABILITY_BOUND_MAX_S: u64 = 1 << 20;

/// `2^{−5^{S_i}}`.
pub fn subcongruence_probability_bound(s_i: &BigUint) -> Result<LogQuantity, EntropyError> {
    let s = s_i
        .to_u64()
        .filter(|s| *s <= PROBABILITY_BOUND_MAX_S)
        .ok_or_else(|| EntropyError::TooLarge(format!("5^{s_i}")))?;
    let e = BigInt::from(5).pow(s as u32);
    Ok(LogQuantity::from_log2(Sign::Positive, Interval::from_int(-e)))
}

/// `8^{S'}·μ·h(p) − (p/8^{S+1})·8^{S'}·(1−p)` with `S' = s_next`.
pub fn claim1_terms(mu_rest: &BigRational, p_next: &BigRational, s_next: &BigUint, s: &BigUint) -> TermSum {
    let e = BigInt::from(s_next.clone()) * 3;
    let mut x = TermSum::single(mu_rest, Atom::Entropy(p_next.clone()), &e);
    let penalty = p_next * (one() - p_next);
    x.push(-penalty, Atom::One, e - (BigInt::from(s.clone()) + 1) * 3);
    x
}

pub fn claim1_bound(
    mu_rest: &BigRational,
    p_next: &BigRational,
    s_next: &BigUint,
    s: &BigUint,
) -> Result<LogQuantity, EntropyError> {
    check_probability(p_next)?;
    if mu_rest.is_negative() || *mu_rest > one() {
        return Err(EntropyError::OutOfRange(format!("measure {mu_rest} not in [0,1]")));
    }
    claim1_terms(mu_rest, p_next, s_next, s)
        .to_log_quantity()
        .ok_or(EntropyError::Uncertain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::ratio;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn val(x: &LogQuantity) -> f64 {
        x.value().unwrap().mid_f64()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(val(&binary_entropy(&ratio(1, 2)).unwrap()), 1.0);
        assert!(binary_entropy(&ratio(0, 1)).unwrap().is_zero());
        let q = 2.0 - 0.75 * 3f64.log2();
        assert!((val(&binary_entropy(&ratio(1, 4)).unwrap()) - q).abs() < 1e-14);
        assert!(binary_entropy(&ratio(3, 2)).is_err());
    }

    #[test]
    fn binomial_logs() {
        let l = log_binomial(&u(8), &u(4)).unwrap();
        assert!((val(&l) - 70f64.log2()).abs() < 1e-13);
        assert!(log_binomial(&u(8), &u(0)).unwrap().is_zero());
        assert_eq!(log_binomial(&u(3), &u(4)), Err(EntropyError::KExceedsN));
        // Stirling branch agrees with the exact branch just above the cutoff.
        let n = u(EXACT_BINOMIAL_LIMIT + 24);
        let k = &n / 4u32;
        let big = log_binomial(&n, &k).unwrap();
        let a = ratio(1, 4);
        let exact = exact_log_binomial_terms(EXACT_BINOMIAL_LIMIT + 24, (EXACT_BINOMIAL_LIMIT + 24) / 4);
        let st = log_binomial_terms(&BigCount::new(&n), &a).unwrap();
        let d = exact.sub(&st).to_interval().unwrap();
        assert!(d.lo().to_f64().abs() < 1e-12 && d.hi().to_f64().abs() < 1e-12);
        assert!(val(&big) > 0.8 * 1e6);
    }

    #[test]
    fn newton_examples() {
        assert!(check_newton(&u(8), &ratio(1, 2)).unwrap());
        assert!(check_newton(&u(5), &ratio(0, 1)).unwrap());
        assert!(check_newton(&u(4), &ratio(1, 4)).unwrap());
        assert!(check_newton(&u(2), &ratio(1, 2)).unwrap());
        assert!(check_newton(&u(1), &ratio(1, 1)).unwrap());
        assert!(check_newton(&u(8), &ratio(1, 3)).is_err());
        let huge = BigUint::from(8u32).pow(24);
        assert!(check_newton(&huge, &ratio(1, 2)).unwrap());
    }

    #[test]
    fn prenewton_examples() {
        assert!(check_prenewton(&u(8), &ratio(1, 2)).unwrap());
        assert!(check_prenewton(&u(2), &ratio(1, 2)).unwrap());
        assert!(check_prenewton(&u(100), &ratio(1, 4)).unwrap());
        assert!(check_prenewton(&u(4), &ratio(0, 1)).is_err());
    }

    #[test]
    fn ediff_examples() {
        assert!(check_ediff(&ratio(1, 2), &ratio(1, 4)).unwrap());
        assert!(check_ediff(&ratio(1, 3), &ratio(0, 1)).unwrap());
        assert!(check_ediff(&ratio(2, 7), &ratio(2, 7)).unwrap());
        assert!(check_ediff(&ratio(1, 3), &ratio(1, 2)).is_err());
    }

    #[test]
    fn logrange_examples() {
        let l = logrange_step(&u(8), &u(1), &ratio(1, 2)).unwrap();
        assert!((val(&l) - 8.0 * 70f64.log2()).abs() < 1e-12);
        assert!(logrange_step(&u(8), &u(1), &ratio(1, 1)).unwrap().is_zero());
        let l = logrange_step(&u(1), &u(1), &ratio(7, 8)).unwrap();
        assert_eq!(l.value().unwrap().lo().to_f64(), 3.0);
        assert!(logrange_step(&u(1), &u(1), &ratio(1, 16)).is_err());
    }

    #[test]
    fn increment_examples() {
        let a = prop32_lower_bound(&ratio(1, 1), &ratio(1, 2), &u(2)).unwrap();
        assert_eq!(val(&a), 60.0);
        let b = prop38_upper_bound(&ratio(1, 1), &ratio(1, 2), &u(2)).unwrap();
        assert_eq!(val(&b), 28.0);
        let c = prop32_lower_bound(&ratio(1, 1), &ratio(1, 1), &u(3)).unwrap();
        assert_eq!(val(&c), -9.0);
        let d = prop38_upper_bound(&ratio(1, 1), &ratio(1, 1), &u(3)).unwrap();
        assert_eq!(val(&d), -216.0);
        // strict step i = 1 stays finite in the log domain
        let big = prop38_upper_bound(&ratio(1, 16), &ratio(1, 2), &u(25)).unwrap();
        assert_eq!(big.sign(), Sign::Positive);
    }

    #[test]
    fn threshold_scan() {
        let r = find_i0(&u(0), &ratio(1, 16), &[u(2), u(30)]);
        assert_eq!(r.holds, vec![false, true]);
        assert_eq!(r.index, Some(1));
        assert!(margin_terms(&u(4)).certainly_nonneg());
        assert!(margin_terms(&u(1)).certainly_nonneg());
        assert!(margin_terms(&u(0)).certainly_nonneg());
    }

    #[test]
    fn probability_bounds() {
        let b = subcongruence_probability_bound(&u(10)).unwrap();
        assert_eq!(b.log2_abs().unwrap(), &Interval::from_int(-9765625));
        assert_eq!(val(&subcongruence_probability_bound(&u(1)).unwrap()), 1.0 / 32.0);
    }

    #[test]
    fn claim1_examples() {
        let x = claim1_bound(&ratio(1, 1), &ratio(1, 2), &u(2), &u(0)).unwrap();
        assert_eq!(val(&x), 62.0);
        assert!(claim1_bound(&ratio(1, 1), &ratio(1, 1), &u(2), &u(0)).unwrap().is_zero());
        let y = claim1_bound(&ratio(0, 1), &ratio(1, 2), &u(2), &u(0)).unwrap();
        assert_eq!(val(&y), -2.0);
    }
}
