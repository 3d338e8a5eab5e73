use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational of the form `numerator / 2^exponent`.
///
/// The representation is canonical: the numerator is odd, or it is zero and
/// the exponent is zero. Two values are equal iff their fields are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigInt,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        let mut numerator = numerator.into();
        let mut exponent = exponent;
        if numerator.is_zero() {
            return Self::zero();
        }
        let tz = numerator.trailing_zeros().unwrap_or(0);
        let shift = tz.min(exponent as u64) as u32;
        if shift > 0 {
            numerator >>= shift;
            exponent -= shift;
        }
        Self {
            numerator,
            exponent,
        }
    }

    pub fn zero() -> Self {
        Self {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::new(v, 0)
    }

    /// `2^(-k)`.
    pub fn pow2_neg(k: u32) -> Self {
        Self::new(1, k)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self {
            numerator: self.numerator.abs(),
            exponent: self.exponent,
        }
    }

    /// Multiplies by `2^k` for any signed `k`.
    pub fn shl(&self, k: i64) -> Self {
        if k >= 0 {
            let k = k as u32;
            if k <= self.exponent {
                Self::new(self.numerator.clone(), self.exponent - k)
            } else {
                Self::new(&self.numerator << (k - self.exponent), 0)
            }
        } else {
            Self::new(self.numerator.clone(), self.exponent + (-k) as u32)
        }
    }

    /// Numerator after scaling to the common denominator `2^exponent`.
    pub fn scaled_numerator(&self, exponent: u32) -> BigInt {
        assert!(exponent >= self.exponent, "exponent below canonical exponent");
        &self.numerator << (exponent - self.exponent)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::one() << self.exponent)
    }

    /// Exact conversion from a rational; `None` if the denominator is not a power of two.
    pub fn from_rational(r: &BigRational) -> Option<Self> {
        let den = r.denom();
        if den.is_zero() {
            return None;
        }
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigInt::one() {
            return None;
        }
        Some(Self::new(r.numer().clone(), tz as u32))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Exact decimal expansion (every dyadic rational has a finite one).
    pub fn to_decimal_string(&self) -> String {
        if self.exponent == 0 {
            return self.numerator.to_string();
        }
        // n / 2^e = n * 5^e / 10^e
        let scaled = self.numerator.abs() * num_traits::pow(BigInt::from(5), self.exponent as usize);
        let digits = scaled.to_string();
        let e = self.exponent as usize;
        let (int_part, frac_part) = if digits.len() > e {
            let split = digits.len() - e;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(e - digits.len()), digits))
        };
        let frac = frac_part.trim_end_matches('0');
        let sign = if self.is_negative() { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    }
}

impl Default for DyadicRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.scaled_numerator(e).cmp(&other.scaled_numerator(e))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(rhs.exponent);
        DyadicRational::new(self.scaled_numerator(e) + rhs.scaled_numerator(e), e)
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(rhs.exponent);
        DyadicRational::new(self.scaled_numerator(e) - rhs.scaled_numerator(e), e)
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(&self.numerator * &rhs.numerator, self.exponent + rhs.exponent)
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            numerator: -&self.numerator,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: DyadicRational) -> DyadicRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        -&self
    }
}

/// Renders as `num/2^k`, or a bare integer when the exponent is zero.
impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed dyadic rational: {0:?}")]
pub struct ParseDyadicError(pub String);

impl FromStr for DyadicRational {
    type Err = ParseDyadicError;

    /// Accepts `n`, `n/2^k`, or `n/d` with `d` a power of two.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDyadicError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            None => s.parse::<BigInt>().map(Self::from_int).map_err(|_| err()),
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d = d.trim();
                if let Some(k) = d.strip_prefix("2^") {
                    let k: u32 = k.parse().map_err(|_| err())?;
                    Ok(Self::new(n, k))
                } else {
                    let d: BigInt = d.parse().map_err(|_| err())?;
                    if d.is_zero() || d.is_negative() {
                        return Err(err());
                    }
                    Self::from_rational(&BigRational::new(n, d)).ok_or_else(err)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let a = DyadicRational::new(12, 4);
        assert_eq!(a.numerator(), &BigInt::from(3));
        assert_eq!(a.exponent(), 2);
        assert_eq!(DyadicRational::new(0, 9), DyadicRational::zero());
        assert_eq!(DyadicRational::new(8, 2), DyadicRational::from_int(2));
    }

    #[test]
    fn arithmetic() {
        let a = DyadicRational::new(3, 2);
        let b = DyadicRational::new(1, 3);
        assert_eq!(&a + &b, DyadicRational::new(7, 3));
        assert_eq!(&a - &b, DyadicRational::new(5, 3));
        assert_eq!(&a * &b, DyadicRational::new(3, 5));
        assert!(a > b);
        assert_eq!(a.shl(2), DyadicRational::from_int(3));
        assert_eq!(a.shl(-1), DyadicRational::new(3, 3));
    }

    #[test]
    fn text_forms() {
        let a: DyadicRational = "3/2^6".parse().unwrap();
        assert_eq!(a.to_string(), "3/2^6");
        let b: DyadicRational = "-6/16".parse().unwrap();
        assert_eq!(b, DyadicRational::new(-3, 3));
        assert!("1/3".parse::<DyadicRational>().is_err());
        assert_eq!(DyadicRational::new(3, 6).to_decimal_string(), "0.046875");
        assert_eq!(DyadicRational::new(-5, 1).to_decimal_string(), "-2.5");
        assert_eq!(DyadicRational::from_int(7).to_decimal_string(), "7");
    }
}
