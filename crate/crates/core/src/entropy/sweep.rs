//! Exhaustive check of the binomial lemmas for all `n` up to a few thousand.
//!
//! Every `log₂ j` is enclosed in a fixed-point interval with `FRAC` fractional
//! bits, so each comparison is a handful of `i128` operations. Whenever the
//! table cannot separate the two sides the case is decided exactly with
//! big integers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::binom::binomial;
use super::bounds::check_prenewton;
use super::interval::{pi, Interval};

const FRAC: i64 = 96;

/// Largest `n` the fixed-point table supports without overflow.
pub const SWEEP_MAX_N: u32 = 1 << 16;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub max_n: u32,
    /// `(n, k)` pairs examined.
    pub cases: u64,
    /// Pairs decided by exact big-integer arithmetic.
    pub exact_fallbacks: u64,
    pub newton_failures: Vec<(u32, u32)>,
    pub prenewton_failures: Vec<(u32, u32)>,
}

impl SweepReport {
    pub fn all_hold(&self) -> bool {
        self.newton_failures.is_empty() && self.prenewton_failures.is_empty()
    }
}

/// `[floor(x·2^FRAC), ceil(x·2^FRAC)]` for an interval `x`.
fn fixed(x: &Interval) -> (i128, i128) {
    let s = x.scale_pow2(FRAC);
    let lo = s.lo().floor();
    let hi = -s.neg().lo().floor();
    (lo.to_i128().expect("fits"), hi.to_i128().expect("fits"))
}

struct Table {
    lg: Vec<(i128, i128)>,
    /// Prefix sums: `log₂ j!`.
    fact: Vec<(i128, i128)>,
}

impl Table {
    fn new(max_n: u32) -> Self {
        let mut lg = vec![(0, 0); max_n as usize + 1];
        let mut fact = vec![(0, 0); max_n as usize + 1];
        for j in 1..=max_n as usize {
            lg[j] = if j.is_power_of_two() {
                let v = (j.trailing_zeros() as i128) << FRAC;
                (v, v)
            } else {
                fixed(&Interval::from_int(j as u64).log2())
            };
            fact[j] = (fact[j - 1].0 + lg[j].0, fact[j - 1].1 + lg[j].1);
        }
        Self { lg, fact }
    }
}

fn pow(b: u32, e: u32) -> BigUint {
    BigUint::from(b).pow(e)
}

/// `C·k^k·(n−k)^(n−k)` and `n^n`.
fn newton_sides(n: u32, k: u32) -> (BigUint, BigUint) {
    let c = binomial(n.into(), k.into());
    (c * pow(k, k) * pow(n - k, n - k), pow(n, n))
}

fn newton_exact(n: u32, k: u32) -> bool {
    let (lhs, nn) = newton_sides(n, k);
    lhs <= nn && nn <= lhs * n
}

fn prenewton_lower_exact(n: u32, k: u32) -> bool {
    let c = binomial(n.into(), k.into());
    let lhs = c.pow(2) * 8u32 * k * (n - k) * pow(k, 2 * k) * pow(n - k, 2 * (n - k));
    lhs >= pow(n, 2 * n + 1)
}

fn prenewton_upper_exact(n: u32, k: u32) -> bool {
    let alpha = BigRational::new(BigInt::from(k), BigInt::from(n));
    check_prenewton(&BigUint::from(n), &alpha).unwrap_or(false)
}

/// Checks both binomial lemmas for every `1 ≤ n ≤ max_n` and every `k`.
pub fn sweep_binomial_lemmas(max_n: u32) -> SweepReport {
    assert!(max_n <= SWEEP_MAX_N, "sweep limited to n ≤ {SWEEP_MAX_N}");
    let t = Table::new(max_n);
    let one = 1i128 << FRAC;
    let lg2pi = {
        let (lo, hi) = fixed(&pi().log2());
        (lo + one, hi + one)
    };
    let mut rep = SweepReport {
        max_n,
        ..SweepReport::default()
    };
    for n in 1..=max_n {
        let nu = n as usize;
        let (ln_lo, ln_hi) = t.lg[nu];
        for k in 0..=n {
            rep.cases += 1;
            if k == 0 || k == n {
                // C = 1, h = 0: the inequalities read 1/n ≤ 1 ≤ 1.
                continue;
            }
            let (ku, mu) = (k as usize, (n - k) as usize);
            let (n128, k128, m128) = (n as i128, k as i128, (n - k) as i128);
            // n·h(α) = n·lg n − k·lg k − (n−k)·lg(n−k)
            let e_lo = n128 * ln_lo - k128 * t.lg[ku].1 - m128 * t.lg[mu].1;
            let e_hi = n128 * ln_hi - k128 * t.lg[ku].0 - m128 * t.lg[mu].0;
            let c_lo = t.fact[nu].0 - t.fact[ku].1 - t.fact[mu].1;
            let c_hi = t.fact[nu].1 - t.fact[ku].0 - t.fact[mu].0;

            let newton_fast = c_hi <= e_lo && e_hi - ln_lo <= c_lo;
            if !newton_fast {
                rep.exact_fallbacks += 1;
                if !newton_exact(n, k) {
                    rep.newton_failures.push((n, k));
                }
            }

            // log₂(nα(1−α)) = lg k + lg(n−k) − lg n
            let v_lo = t.lg[ku].0 + t.lg[mu].0 - ln_hi;
            let v_hi = t.lg[ku].1 + t.lg[mu].1 - ln_lo;
            let lower_fast = 2 * c_lo >= 2 * e_hi - v_lo - 3 * one;
            let upper_fast = 2 * c_hi <= 2 * e_lo - v_hi - lg2pi.1;
            if !(lower_fast && upper_fast) {
                rep.exact_fallbacks += 1;
                let ok = (lower_fast || prenewton_lower_exact(n, k))
                    && (upper_fast || prenewton_upper_exact(n, k));
                if !ok {
                    rep.prenewton_failures.push((n, k));
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::bounds::check_newton;

    #[test]
    fn table_agrees_with_direct_checks() {
        let rep = sweep_binomial_lemmas(64);
        assert!(rep.all_hold(), "{rep:?}");
        assert_eq!(rep.cases, (1..=64u64).map(|n| n + 1).sum::<u64>());
        for n in 1..=64u32 {
            for k in 0..=n {
                let a = BigRational::new(BigInt::from(k), BigInt::from(n));
                assert!(check_newton(&BigUint::from(n), &a).unwrap());
                assert!(newton_exact(n, k));
                if 0 < k && k < n {
                    assert!(prenewton_lower_exact(n, k));
                }
            }
        }
    }

    #[test]
    fn exact_sides_detect_violations() {
        // n = 2, k = 1 sits on the lower Newton bound: 4/2 = 2 = C(2,1).
        let (lhs, nn) = newton_sides(2, 1);
        assert_eq!(lhs * 2u32, nn);
        assert!(newton_exact(2, 1));
        // and C(4,1)·1·3³ = 108 ≤ 256 = 4⁴ ≤ 432
        assert_eq!(newton_sides(4, 1), (BigUint::from(108u32), BigUint::from(256u32)));
    }
}
