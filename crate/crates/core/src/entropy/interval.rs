//! Certified interval arithmetic over binary floating values with big
//! mantissas. Every operation rounds outward, so the true result always lies
//! in the returned interval.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Working precision in mantissa bits.
pub const PREC: u64 = 192;

/// Fixed-point width used inside the series evaluations.
const W: u64 = PREC + 64;

/// Exponent below which `2^x` is replaced by the enclosure `[0, 2^TINY_EXP]`.
const TINY_EXP: i64 = -(1 << 50);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dir {
    Down,
    Up,
}

/// `m · 2^e`, kept with odd mantissa (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dy {
    m: BigInt,
    e: i64,
}

fn shr_floor(m: &BigInt, k: u64) -> BigInt {
    if m.is_negative() {
        let t: BigInt = -m;
        let mask: BigInt = (BigInt::one() << k) - 1u32;
        let q: BigInt = (t + mask) >> k;
        -q
    } else {
        m >> k
    }
}

fn shr_dir(m: &BigInt, k: u64, dir: Dir) -> BigInt {
    match dir {
        Dir::Down => shr_floor(m, k),
        Dir::Up => -shr_floor(&-m, k),
    }
}

impl Dy {
    pub fn new(m: impl Into<BigInt>, e: i64) -> Self {
        let m = m.into();
        if m.is_zero() {
            return Self { m, e: 0 };
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        Self { m: m >> tz, e: e + tz as i64 }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::new(v, 0)
    }

    pub fn pow2(e: i64) -> Self {
        Self::new(1, e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.m.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Position of the leading bit: `|self| ∈ [2^(top-1), 2^top)`.
    fn top(&self) -> i64 {
        self.e + self.m.bits() as i64
    }

    fn round(self, dir: Dir) -> Self {
        let bits = self.m.bits();
        if bits <= PREC {
            return self;
        }
        let k = bits - PREC;
        Self::new(shr_dir(&self.m, k, dir), self.e + k as i64)
    }

    fn neg(&self) -> Self {
        Self {
            m: -&self.m,
            e: self.e,
        }
    }

    fn add_dir(&self, other: &Self, dir: Dir) -> Self {
        if self.is_zero() {
            return other.clone().round(dir);
        }
        if other.is_zero() {
            return self.clone().round(dir);
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        // The smaller operand is below one unit in the last place of a
        // (PREC + 2)-bit version of the larger one: fold it into a sticky ulp.
        if big.top() - small.top() > PREC as i64 + 4 {
            let shift = (PREC + 2).saturating_sub(big.m.bits());
            let m = &big.m << shift;
            let e = big.e - shift as i64;
            let m = match (dir, small.signum() > 0) {
                (Dir::Down, true) | (Dir::Up, false) => m,
                (Dir::Down, false) => m - 1,
                (Dir::Up, true) => m + 1,
            };
            return Self::new(m, e).round(dir);
        }
        let e = self.e.min(other.e);
        let a = &self.m << (self.e - e) as u64;
        let b = &other.m << (other.e - e) as u64;
        Self::new(a + b, e).round(dir)
    }

    fn mul_dir(&self, other: &Self, dir: Dir) -> Self {
        Self::new(&self.m * &other.m, self.e + other.e).round(dir)
    }

    fn div_dir(&self, other: &Self, dir: Dir) -> Self {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let s = (PREC + 2 + other.m.bits()).saturating_sub(self.m.bits());
        let num = &self.m << s;
        let (q, r) = num.div_mod_floor(&other.m);
        let q = if dir == Dir::Up && !r.is_zero() { q + 1 } else { q };
        Self::new(q, self.e - s as i64 - other.e).round(dir)
    }

    fn from_ratio_dir(r: &BigRational, dir: Dir) -> Self {
        Self::from_int(r.numer().clone()).div_dir(&Self::from_int(r.denom().clone()), dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.e >= 0 {
            BigRational::from_integer(&self.m << self.e as u64)
        } else {
            BigRational::new(self.m.clone(), BigInt::one() << (-self.e) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits();
        let k = bits.saturating_sub(60);
        let m = shr_floor(&self.m, k).to_f64().unwrap_or(f64::NAN);
        let e = self.e + k as i64;
        if e > 2000 {
            m.signum() * f64::INFINITY
        } else if e < -2000 {
            0.0
        } else {
            m * 2f64.powi(e as i32)
        }
    }

    /// `⌊self⌋`.
    pub fn floor(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << self.e as u64
        } else {
            shr_floor(&self.m, (-self.e) as u64)
        }
    }
}

impl Ord for Dy {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            let mag = ta.cmp(&tb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        let e = self.e.min(other.e);
        let a = &self.m << (self.e - e) as u64;
        let b = &other.m << (other.e - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dy {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A closed interval `[lo, hi]` certified to contain some real number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Dy,
    hi: Dy,
}

impl Interval {
    pub fn new(lo: Dy, hi: Dy) -> Self {
        assert!(lo <= hi, "empty interval");
        Self { lo, hi }
    }

    pub fn point(v: Dy) -> Self {
        Self {
            lo: v.clone().round(Dir::Down),
            hi: v.round(Dir::Up),
        }
    }

    pub fn zero() -> Self {
        Self::point(Dy::zero())
    }

    pub fn one() -> Self {
        Self::point(Dy::from_int(1))
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::point(Dy::from_int(v))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self {
            lo: Dy::from_ratio_dir(r, Dir::Down),
            hi: Dy::from_ratio_dir(r, Dir::Up),
        }
    }

    pub fn lo(&self) -> &Dy {
        &self.lo
    }

    pub fn hi(&self) -> &Dy {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Dy {
        self.hi.add_dir(&self.lo.neg(), Dir::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }

    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lo.signum() >= 0
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn contains(&self, v: &Dy) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    /// Certainly `self < other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    /// Certainly `self <= other`.
    pub fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.add_dir(&other.lo, Dir::Down),
            hi: self.hi.add_dir(&other.hi, Dir::Up),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = cands.iter().map(|(a, b)| a.mul_dir(b, Dir::Down)).min().expect("four");
        let hi = cands.iter().map(|(a, b)| a.mul_dir(b, Dir::Up)).max().expect("four");
        Self { lo, hi }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        self.mul(&Self::from_int(k.clone()))
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        self.mul(&Self::from_rational(r))
    }

    /// Multiplies by `2^k` exactly.
    pub fn scale_pow2(&self, k: i64) -> Self {
        Self {
            lo: Dy::new(self.lo.m.clone(), self.lo.e + k),
            hi: Dy::new(self.hi.m.clone(), self.hi.e + k),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.contains_zero(), "interval division by an interval containing zero");
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = cands.iter().map(|(a, b)| a.div_dir(b, Dir::Down)).min().expect("four");
        let hi = cands.iter().map(|(a, b)| a.div_dir(b, Dir::Up)).max().expect("four");
        Self { lo, hi }
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Natural logarithm; requires a positive interval.
    pub fn ln(&self) -> Self {
        assert!(self.is_positive(), "logarithm of a non-positive interval");
        Self {
            lo: ln_point(&self.lo).lo,
            hi: ln_point(&self.hi).hi,
        }
    }

    /// Base-2 logarithm; exact on powers of two.
    pub fn log2(&self) -> Self {
        assert!(self.is_positive(), "logarithm of a non-positive interval");
        Self {
            lo: log2_point(&self.lo).lo,
            hi: log2_point(&self.hi).hi,
        }
    }

    /// `2^self`.
    pub fn exp2(&self) -> Self {
        Self {
            lo: exp2_point(&self.lo).lo,
            hi: exp2_point(&self.hi).hi,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

/// Fixed-point value `v / 2^W` widened by `err` units into an interval.
fn fixed_interval(v: BigInt, err: u64) -> Interval {
    let err = BigInt::from(err);
    Interval {
        lo: Dy::new(&v - &err, -(W as i64)).round(Dir::Down),
        hi: Dy::new(&v + &err, -(W as i64)).round(Dir::Up),
    }
}

/// `2·atanh(p/q)` for `0 <= p/q <= 1/3`, i.e. `ln((q+p)/(q-p))`.
///
/// `z` is supplied in fixed point with an error of at most `z_err` units.
/// The series is truncated after `n` terms; each term carries at most
/// `8 + z_err` units of error and the tail is bounded by `(1/3)^(2n+1)·9/8`.
fn atanh2_fixed(z: &BigInt, z_err: u64) -> Interval {
    let n_terms = (W + 4) / 3 + 2;
    let z2 = (z * z) >> W;
    let mut pow = z.clone();
    let mut sum = BigInt::zero();
    for j in 0..n_terms {
        sum += &pow / BigInt::from(2 * j + 1);
        pow = (&pow * &z2) >> W;
        if pow.is_zero() {
            break;
        }
    }
    // tail < 2^-(W+2) by the choice of n_terms; count it as one unit
    let err = n_terms * (8 + 4 * z_err) + 1;
    fixed_interval(sum << 1, 2 * err)
}

fn ln2() -> &'static Interval {
    static LN2: OnceLock<Interval> = OnceLock::new();
    LN2.get_or_init(|| {
        let z = (BigInt::one() << W) / BigInt::from(3);
        atanh2_fixed(&z, 1)
    })
}

/// Certified `π`, from Machin's formula `π = 16·atan(1/5) − 4·atan(1/239)`.
pub fn pi() -> &'static Interval {
    static PI: OnceLock<Interval> = OnceLock::new();
    PI.get_or_init(|| {
        let atan_inv = |k: u64| -> (BigInt, u64) {
            // atan(1/k) = Σ (-1)^j / ((2j+1) k^(2j+1)); every floor costs a unit
            let k2 = BigInt::from(k * k);
            let mut pow = (BigInt::one() << W) / BigInt::from(k);
            let mut sum = BigInt::zero();
            let mut j = 0u64;
            while !pow.is_zero() {
                let t = &pow / BigInt::from(2 * j + 1);
                if j % 2 == 0 {
                    sum += t;
                } else {
                    sum -= t;
                }
                pow /= &k2;
                j += 1;
            }
            (sum, 2 * j + 2)
        };
        let (a, ea) = atan_inv(5);
        let (b, eb) = atan_inv(239);
        let v = a * 16 - b * 4;
        fixed_interval(v, 16 * ea + 4 * eb)
    })
}

/// `ln x` for a positive point.
fn ln_point(x: &Dy) -> Interval {
    assert!(x.signum() > 0);
    let bits = x.m.bits();
    // x = r · 2^k with r = m / 2^(bits-1) ∈ [1, 2)
    let k = x.e + bits as i64 - 1;
    let one = BigInt::one() << W;
    let (r, r_err) = if bits - 1 <= W {
        (&x.m << (W - (bits - 1)), 0u64)
    } else {
        (shr_floor(&x.m, bits - 1 - W), 1u64)
    };
    let ln_r = if r == one {
        Interval::zero()
    } else {
        // z = (r-1)/(r+1) ∈ [0, 1/3); dz/dr <= 1/2, so r's error adds at most one unit
        let z = ((&r - &one) << W) / (&r + &one);
        atanh2_fixed(&z, 1 + r_err)
    };
    if k == 0 {
        ln_r
    } else {
        ln2().mul_int(&BigInt::from(k)).add(&ln_r)
    }
}

fn log2_point(x: &Dy) -> Interval {
    assert!(x.signum() > 0);
    if x.m.is_one() {
        return Interval::from_int(x.e);
    }
    ln_point(x).div(ln2())
}

/// `2^y` for a point `y`.
fn exp2_point(y: &Dy) -> Interval {
    let k = y.floor();
    let k = match k.to_i64() {
        Some(k) if k > TINY_EXP => k,
        Some(_) => return Interval::new(Dy::zero(), Dy::pow2(TINY_EXP)),
        None if k.is_negative() => return Interval::new(Dy::zero(), Dy::pow2(TINY_EXP)),
        None => panic!("2^y overflows: y is too large"),
    };
    assert!(k < 1 << 60, "2^y overflows: y is too large");
    let f = Interval::point(y.clone()).sub(&Interval::from_int(k));
    if f.hi.is_zero() {
        return Interval::point(Dy::pow2(k));
    }
    // e^(f·ln2) with f·ln2 ∈ [0, 0.7): Taylor series on both endpoints.
    let t = f.mul(ln2());
    let series = |t: &Dy| -> Interval {
        let tf = if t.signum() <= 0 {
            BigInt::zero()
        } else {
            Dy::new(t.m.clone(), t.e + W as i64).floor()
        };
        let mut term = BigInt::one() << W;
        let mut sum = BigInt::zero();
        let mut j = 1u64;
        while !term.is_zero() {
            sum += &term;
            term = ((&term * &tf) >> W) / BigInt::from(j);
            j += 1;
        }
        // each step loses at most two units; tf itself is low by up to one
        // unit, which moves the sum by less than two units
        fixed_interval(sum, 2 * j + 4)
    };
    let lo = series(&t.lo).lo;
    let hi = series(&t.hi).hi;
    Interval { lo, hi }.scale_pow2(k)
}
