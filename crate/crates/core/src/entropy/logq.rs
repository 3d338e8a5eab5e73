use std::fmt;

use num_rational::BigRational;

use super::interval::{Dy, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn flip(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// A real number of possibly astronomical size: an exact sign and a
/// certified enclosure of `log₂|x|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogQuantity {
    sign: Sign,
    log2_abs: Interval,
}

/// Magnitudes up to `2^(2^LINEAR_LIMIT)` are converted back to linear intervals.
const LINEAR_LIMIT: i64 = 40;

impl LogQuantity {
    pub fn zero() -> Self {
        Self {
            sign: Sign::Zero,
            log2_abs: Interval::zero(),
        }
    }

    pub fn from_log2(sign: Sign, log2_abs: Interval) -> Self {
        if sign == Sign::Zero {
            return Self::zero();
        }
        Self { sign, log2_abs }
    }

    /// `None` when the interval straddles zero without being exactly zero.
    pub fn from_interval(v: &Interval) -> Option<Self> {
        if v.is_point() && v.lo().is_zero() {
            Some(Self::zero())
        } else if v.is_positive() {
            Some(Self::from_log2(Sign::Positive, v.log2()))
        } else if v.is_negative() {
            Some(Self::from_log2(Sign::Negative, v.neg().log2()))
        } else {
            None
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_interval(&Interval::from_rational(r)).expect("exact rational has a sign")
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// Enclosure of `log₂|x|`; `None` for zero.
    pub fn log2_abs(&self) -> Option<&Interval> {
        (self.sign != Sign::Zero).then_some(&self.log2_abs)
    }

    /// Linear enclosure, when the magnitude is representable.
    pub fn value(&self) -> Option<Interval> {
        match self.sign {
            Sign::Zero => Some(Interval::zero()),
            s => {
                if *self.log2_abs.hi() > Dy::pow2(LINEAR_LIMIT) {
                    return None;
                }
                let mag = self.log2_abs.exp2();
                Some(if s == Sign::Positive { mag } else { mag.neg() })
            }
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            sign: self.sign.flip(),
            log2_abs: self.log2_abs.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let sign = self.sign.times(other.sign);
        if sign == Sign::Zero {
            return Self::zero();
        }
        Self::from_log2(sign, self.log2_abs.add(&other.log2_abs))
    }

    /// Sum, or `None` if the sign of the result cannot be certified.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if self.sign == Sign::Zero {
            return Some(other.clone());
        }
        if other.sign == Sign::Zero {
            return Some(self.clone());
        }
        let (x, y) = (&self.log2_abs, &other.log2_abs);
        if self.sign == other.sign {
            // log₂(2^u + 2^v) is increasing in both arguments.
            let lo = log_sum(x.lo(), y.lo()).lo().clone();
            let hi = log_sum(x.hi(), y.hi()).hi().clone();
            return Some(Self::from_log2(self.sign, Interval::new(lo, hi)));
        }
        // Opposite signs: the larger magnitude must be certain.
        let (big, small, sign) = if y.certainly_lt(x) {
            (x, y, self.sign)
        } else if x.certainly_lt(y) {
            (y, x, other.sign)
        } else {
            return None;
        };
        // log₂(2^u − 2^v), increasing in u and decreasing in v.
        let lo = log_diff(big.lo(), small.hi())?.lo().clone();
        let hi = log_diff(big.hi(), small.lo())?.hi().clone();
        Some(Self::from_log2(sign, Interval::new(lo, hi)))
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.neg())
    }

    /// Certainly `self < other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        matches!(other.checked_sub(self), Some(d) if d.sign == Sign::Positive)
    }

    /// Certainly `self <= other`.
    pub fn certainly_le(&self, other: &Self) -> bool {
        matches!(other.checked_sub(self), Some(d) if d.sign != Sign::Negative)
    }

    /// Union of two enclosures of the same sign.
    pub fn hull(&self, other: &Self) -> Option<Self> {
        if self.sign != other.sign {
            return None;
        }
        Some(Self::from_log2(self.sign, self.log2_abs.hull(&other.log2_abs)))
    }

    /// Midpoint estimate of `log₂|x|` for display.
    pub fn log2_f64(&self) -> f64 {
        match self.sign {
            Sign::Zero => f64::NEG_INFINITY,
            _ => self.log2_abs.mid_f64(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            Sign::Positive => self.log2_f64().exp2(),
            Sign::Negative => -self.log2_f64().exp2(),
        }
    }
}

/// `log₂(2^u + 2^v)` for points.
fn log_sum(u: &Dy, v: &Dy) -> Interval {
    let (m, d) = if u >= v {
        (u, Interval::point(v.clone()).sub(&Interval::point(u.clone())))
    } else {
        (v, Interval::point(u.clone()).sub(&Interval::point(v.clone())))
    };
    Interval::point(m.clone()).add(&Interval::one().add(&d.exp2()).log2())
}

/// `log₂(2^u − 2^v)` for points with `v < u`.
fn log_diff(u: &Dy, v: &Dy) -> Option<Interval> {
    let d = Interval::point(v.clone()).sub(&Interval::point(u.clone()));
    let rest = Interval::one().sub(&d.exp2());
    if !rest.is_positive() {
        return None;
    }
    Some(Interval::point(u.clone()).add(&rest.log2()))
}

impl fmt::Display for LogQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            s => {
                let sign = if s == Sign::Negative { "-" } else { "" };
                if let Some(v) = self.value() {
                    if v.mid_f64().abs() < 1e15 {
                        return write!(f, "{}", v.mid_f64());
                    }
                }
                write!(f, "{sign}2^{}", self.log2_abs.mid_f64())
            }
        }
    }
}
