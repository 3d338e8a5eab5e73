use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::matrix::{d1, format_mat4, IntAffine, Mat4, RigidMotion, Q};
use super::MotionError;

/// A homogeneous matrix whose entries are multiples of `2^-(n+5)` with
/// absolute value below 4. Not required to be orthogonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridMatrix {
    n: u32,
    num: [[i64; 4]; 4],
}

impl GridMatrix {
    /// Largest supported grid level; numerators must stay well inside `i64`.
    pub const MAX_N: u32 = 48;

    pub fn denominator_exponent(n: u32) -> u32 {
        n + 5
    }

    /// Builds from numerators over `2^(n+5)`; validates the grid and bottom row.
    pub fn from_numerators(n: u32, num: [[i64; 4]; 4]) -> Result<Self, MotionError> {
        let den = 1i64 << Self::denominator_exponent(n);
        if num[3] != [0, 0, 0, den] {
            return Err(MotionError::BadBottomRow);
        }
        for row in &num[..3] {
            for &v in row {
                if v.abs() >= 4 * den {
                    return Err(MotionError::OffGrid {
                        n,
                        value: format!("{v}/2^{}", n + 5),
                    });
                }
            }
        }
        Ok(Self { n, num })
    }

    /// Entrywise nearest grid point, ties toward `-∞`.
    pub fn round(m: &Mat4, n: u32) -> Result<Self, MotionError> {
        let rows = m.map(|row| row.map(|v| BigRational::new(BigInt::from(*v.numer()), BigInt::from(*v.denom()))));
        Self::round_big(&rows, n)
    }

    /// Rounds a floating-point matrix; each `f64` is taken at its exact binary value.
    pub fn round_f64(m: &[[f64; 4]; 4], n: u32) -> Result<Self, MotionError> {
        let mut rows: [[BigRational; 4]; 4] = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                rows[i][j] = BigRational::from_float(m[i][j])
                    .ok_or_else(|| MotionError::Parse(format!("non-finite entry {}", m[i][j])))?;
            }
        }
        Self::round_big(&rows, n)
    }

    fn round_big(m: &[[BigRational; 4]; 4], n: u32) -> Result<Self, MotionError> {
        assert!(n <= Self::MAX_N, "grid level {n} too large");
        if m[3][..3].iter().any(|v| !v.is_zero()) || !m[3][3].is_one() {
            return Err(MotionError::BadBottomRow);
        }
        let den = BigInt::one() << Self::denominator_exponent(n);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut num = [[0i64; 4]; 4];
        for i in 0..3 {
            for j in 0..4 {
                let scaled = &m[i][j] * BigRational::from_integer(den.clone()) - &half;
                let k = scaled.ceil().to_integer();
                num[i][j] = k.to_i64().ok_or_else(|| MotionError::OffGrid {
                    n,
                    value: m[i][j].to_string(),
                })?;
            }
        }
        num[3][3] = 1i64 << Self::denominator_exponent(n);
        Self::from_numerators(n, num)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn numerators(&self) -> &[[i64; 4]; 4] {
        &self.num
    }

    pub fn entry(&self, i: usize, j: usize) -> Q {
        Q::new(self.num[i][j] as i128, 1i128 << Self::denominator_exponent(self.n))
    }

    pub fn to_mat4(&self) -> Mat4 {
        let mut m: Mat4 = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.entry(i, j);
            }
        }
        m
    }

    pub fn to_int_affine(&self) -> IntAffine {
        IntAffine {
            m: [0, 1, 2].map(|i| [0, 1, 2].map(|j| self.num[i][j] as i128)),
            t: [0, 1, 2].map(|i| self.num[i][3] as i128),
            den: 1i128 << Self::denominator_exponent(self.n),
        }
    }

    pub fn distance_to(&self, m: &Mat4) -> Q {
        d1(&self.to_mat4(), m)
    }
}

impl RigidMotion {
    /// Nearest element of the grid at level `n`.
    pub fn round_to_grid(&self, n: u32) -> Result<GridMatrix, MotionError> {
        GridMatrix::round(&self.to_mat4(), n)
    }
}

impl fmt::Display for GridMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_mat4(&self.to_mat4()))
    }
}

/// Point displacement bound `2^-(n+2)` on `K₀` for maps within `d₁ < 2^-(n+5)`.
pub fn displacement_bound(n: u32) -> Q {
    Q::new(1, 1i128 << (n + 2))
}

/// Every admissible single entry at level `n`, increasing.
pub fn grid_values(n: u32) -> impl Iterator<Item = Q> {
    let den = 1i128 << GridMatrix::denominator_exponent(n);
    (-4 * den + 1..4 * den).map(move |k| {
        let g = k.gcd(&den).max(1);
        Q::new_raw(k / g, den / g)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motions::matrix::{identity_mat4, q, qi};
    use num_traits::Signed;

    #[test]
    fn identity_is_on_grid() {
        for n in 0..6 {
            let g = GridMatrix::round(&identity_mat4(), n).unwrap();
            assert_eq!(g.to_mat4(), identity_mat4());
        }
    }

    #[test]
    fn third_rounds_to_eleven_over_32() {
        let t = RigidMotion::translation([q(1, 3), qi(0), qi(0)]);
        let g = t.round_to_grid(0).unwrap();
        assert_eq!(g.entry(0, 3), q(11, 32));
    }

    #[test]
    fn eighth_turn_rounds_to_23_over_32() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let m = [
            [c, -c, 0.0, 0.0],
            [c, c, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let g = GridMatrix::round_f64(&m, 0).unwrap();
        assert_eq!(g.entry(0, 0), q(23, 32));
        assert_eq!(g.entry(1, 0), q(23, 32));
        assert_eq!(g.entry(0, 1), q(-23, 32));
    }

    #[test]
    fn ties_go_down() {
        let t = RigidMotion::translation([q(1, 128), q(-1, 128), qi(0)]);
        let g = t.round_to_grid(1).unwrap();
        assert_eq!(g.entry(0, 3), qi(0));
        assert_eq!(g.entry(1, 3), q(-1, 64));
    }

    #[test]
    fn far_translation_is_off_grid() {
        let t = RigidMotion::translation([qi(4), qi(0), qi(0)]);
        assert!(matches!(t.round_to_grid(0), Err(MotionError::OffGrid { .. })));
    }

    #[test]
    fn grid_cardinality() {
        for n in 0..=8 {
            let vals: Vec<Q> = grid_values(n).collect();
            assert_eq!(vals.len(), (1usize << (n + 8)) - 1);
            assert!(vals.windows(2).all(|w| w[0] < w[1]));
            assert!(vals.iter().all(|v| v.abs() < qi(4)));
        }
    }

    #[test]
    fn displacement_values() {
        assert_eq!(displacement_bound(0), q(1, 4));
        assert_eq!(displacement_bound(3), q(1, 32));
    }

    #[test]
    fn rounding_distance_is_half_step() {
        let r = RigidMotion::from_quaternion([1, 2, 3, 4], [q(1, 3), q(-2, 7), q(5, 11)]).unwrap();
        for n in 0..6 {
            let g = r.round_to_grid(n).unwrap();
            assert!(g.distance_to(&r.to_mat4()) <= Q::new(1, 1i128 << (n + 6)));
        }
    }
}
