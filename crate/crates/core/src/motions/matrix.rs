use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use super::MotionError;
use crate::dyadic::DyadicRational;

/// Exact scalar used by motions. Entries stay small (quaternion norms,
/// grid denominators), so 128-bit ratios are ample.
pub type Q = Ratio<i128>;

/// Homogeneous 4×4 matrix, row-major.
pub type Mat4 = [[Q; 4]; 4];

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

/// Converts a dyadic rational into `Q`; panics if it does not fit.
pub fn q_from_dyadic(d: &DyadicRational) -> Q {
    let num: i128 = d.numerator().try_into().expect("dyadic numerator fits i128");
    Q::new(num, 1i128 << d.exponent())
}

/// `max |A_ij - B_ij|` over all 16 entries.
pub fn d1(a: &Mat4, b: &Mat4) -> Q {
    let mut best = Q::zero();
    for i in 0..4 {
        for j in 0..4 {
            let v = (a[i][j] - b[i][j]).abs();
            if v > best {
                best = v;
            }
        }
    }
    best
}

pub fn identity_mat4() -> Mat4 {
    let mut m: Mat4 = Default::default();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

/// An isometry `x ↦ U·x + V` with `UᵀU = I` exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RigidMotion {
    lin: [[Q; 3]; 3],
    trans: [Q; 3],
}

impl RigidMotion {
    pub fn new(lin: [[Q; 3]; 3], trans: [Q; 3]) -> Result<Self, MotionError> {
        for i in 0..3 {
            for j in 0..3 {
                let dot: Q = (0..3).map(|k| lin[k][i] * lin[k][j]).sum();
                let want = if i == j { Q::one() } else { Q::zero() };
                if dot != want {
                    return Err(MotionError::NotOrthogonal);
                }
            }
        }
        Ok(Self { lin, trans })
    }

    pub fn identity() -> Self {
        Self::translation([Q::zero(), Q::zero(), Q::zero()])
    }

    pub fn translation(v: [Q; 3]) -> Self {
        let mut lin: [[Q; 3]; 3] = Default::default();
        for (i, row) in lin.iter_mut().enumerate() {
            row[i] = Q::one();
        }
        Self { lin, trans: v }
    }

    /// The rotation of the integer quaternion `a + bi + cj + dk`, scaled by
    /// its squared norm so that all entries are rational and the matrix is
    /// exactly orthogonal.
    pub fn from_quaternion(quat: [i64; 4], trans: [Q; 3]) -> Result<Self, MotionError> {
        let [a, b, c, d] = quat.map(i128::from);
        let n = a * a + b * b + c * c + d * d;
        if n == 0 {
            return Err(MotionError::NotOrthogonal);
        }
        let lin = [
            [
                q(a * a + b * b - c * c - d * d, n),
                q(2 * (b * c - a * d), n),
                q(2 * (b * d + a * c), n),
            ],
            [
                q(2 * (b * c + a * d), n),
                q(a * a - b * b + c * c - d * d, n),
                q(2 * (c * d - a * b), n),
            ],
            [
                q(2 * (b * d - a * c), n),
                q(2 * (c * d + a * b), n),
                q(a * a - b * b - c * c + d * d, n),
            ],
        ];
        Ok(Self { lin, trans })
    }

    pub fn linear(&self) -> &[[Q; 3]; 3] {
        &self.lin
    }

    pub fn translation_part(&self) -> &[Q; 3] {
        &self.trans
    }

    pub fn apply(&self, x: &[Q; 3]) -> [Q; 3] {
        apply_affine(&self.lin, &self.trans, x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let lin = mat3_mul(&self.lin, &other.lin);
        let t = apply_affine(&self.lin, &self.trans, &other.trans);
        Self { lin, trans: t }
    }

    pub fn inverse(&self) -> Self {
        let mut lt: [[Q; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                lt[i][j] = self.lin[j][i];
            }
        }
        let t = apply_affine(&lt, &[Q::zero(), Q::zero(), Q::zero()], &self.trans).map(|v| -v);
        Self { lin: lt, trans: t }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn to_mat4(&self) -> Mat4 {
        affine_to_mat4(&self.lin, &self.trans)
    }

    pub fn to_int_affine(&self) -> IntAffine {
        IntAffine::from_rational(&self.lin, &self.trans)
    }

    /// Rebuilds from a homogeneous matrix, checking the bottom row and orthogonality.
    pub fn from_mat4(m: &Mat4) -> Result<Self, MotionError> {
        let (lin, trans) = split_mat4(m)?;
        Self::new(lin, trans)
    }
}

impl fmt::Display for RigidMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_mat4(&self.to_mat4()))
    }
}

pub(crate) fn apply_affine(lin: &[[Q; 3]; 3], trans: &[Q; 3], x: &[Q; 3]) -> [Q; 3] {
    [0, 1, 2].map(|i| lin[i][0] * x[0] + lin[i][1] * x[1] + lin[i][2] * x[2] + trans[i])
}

pub(crate) fn mat3_mul(a: &[[Q; 3]; 3], b: &[[Q; 3]; 3]) -> [[Q; 3]; 3] {
    let mut out: [[Q; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub(crate) fn affine_to_mat4(lin: &[[Q; 3]; 3], trans: &[Q; 3]) -> Mat4 {
    let mut m: Mat4 = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = lin[i][j];
        }
        m[i][3] = trans[i];
    }
    m[3][3] = Q::one();
    m
}

pub fn split_mat4(m: &Mat4) -> Result<([[Q; 3]; 3], [Q; 3]), MotionError> {
    if m[3][0] != Q::zero() || m[3][1] != Q::zero() || m[3][2] != Q::zero() || m[3][3] != Q::one()
    {
        return Err(MotionError::BadBottomRow);
    }
    let mut lin: [[Q; 3]; 3] = Default::default();
    let mut trans: [Q; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            lin[i][j] = m[i][j];
        }
        trans[i] = m[i][3];
    }
    Ok((lin, trans))
}

/// Renders a rational as `num/2^k` when the denominator is a power of two,
/// and `num/den` otherwise.
pub fn format_q(v: &Q) -> String {
    let d = *v.denom();
    if d == 1 {
        v.numer().to_string()
    } else if d.count_ones() == 1 {
        format!("{}/2^{}", v.numer(), d.trailing_zeros())
    } else {
        format!("{}/{}", v.numer(), d)
    }
}

pub fn parse_q(s: &str) -> Result<Q, MotionError> {
    let bad = || MotionError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<i128>().map(qi).map_err(|_| bad()),
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim();
            let d: i128 = if let Some(k) = d.strip_prefix("2^") {
                let k: u32 = k.parse().map_err(|_| bad())?;
                if k > 120 {
                    return Err(bad());
                }
                1i128 << k
            } else {
                d.parse().map_err(|_| bad())?
            };
            if d <= 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// 16 entries, row-major, space separated.
pub fn format_mat4(m: &Mat4) -> String {
    m.iter()
        .flat_map(|row| row.iter().map(format_q))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_mat4(s: &str) -> Result<Mat4, MotionError> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != 16 {
        return Err(MotionError::Parse(format!(
            "expected 16 matrix entries, found {}",
            parts.len()
        )));
    }
    let mut m: Mat4 = Default::default();
    for (k, p) in parts.iter().enumerate() {
        m[k / 4][k % 4] = parse_q(p)?;
    }
    Ok(m)
}

/// An affine map `x ↦ (M·x + T) / den` with integer entries; the form used by
/// all exact geometric predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntAffine {
    pub m: [[i128; 3]; 3],
    pub t: [i128; 3],
    pub den: i128,
}

impl IntAffine {
    pub fn from_rational(lin: &[[Q; 3]; 3], trans: &[Q; 3]) -> Self {
        let mut den = 1i128;
        for row in lin {
            for v in row {
                den = den.lcm(v.denom());
            }
        }
        for v in trans {
            den = den.lcm(v.denom());
        }
        let scale = |v: &Q| v.numer() * (den / v.denom());
        Self {
            m: lin.map(|row| row.map(|v| scale(&v))),
            t: trans.map(|v| scale(&v)),
            den,
        }
    }

    pub fn from_mat4(m: &Mat4) -> Result<Self, MotionError> {
        let (lin, trans) = split_mat4(m)?;
        Ok(Self::from_rational(&lin, &trans))
    }

    pub fn identity() -> Self {
        Self {
            m: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            t: [0, 0, 0],
            den: 1,
        }
    }

    pub fn det(&self) -> i128 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn column(&self, j: usize) -> [i128; 3] {
        [self.m[0][j], self.m[1][j], self.m[2][j]]
    }

    /// Image of an integer point given over `2^level`, as numerators over `den·2^level`.
    pub fn apply_scaled(&self, x: [i128; 3], level: u32) -> [i128; 3] {
        let s = 1i128 << level;
        [0, 1, 2].map(|i| {
            self.m[i][0] * x[0] + self.m[i][1] * x[1] + self.m[i][2] * x[2] + self.t[i] * s
        })
    }

    pub fn to_mat4(&self) -> Mat4 {
        let lin = self.m.map(|row| row.map(|v| Q::new(v, self.den)));
        let trans = self.t.map(|v| Q::new(v, self.den));
        affine_to_mat4(&lin, &trans)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Q {
        q(1, 2)
    }

    #[test]
    fn identity_fixes_points() {
        let x = [half(), half(), half()];
        assert_eq!(RigidMotion::identity().apply(&x), x);
    }

    #[test]
    fn translation_inverse_is_identity() {
        let t = RigidMotion::translation([qi(1), qi(0), qi(0)]);
        assert!(t.compose(&t.inverse()).is_identity());
        assert!(t.inverse().compose(&t).is_identity());
    }

    #[test]
    fn quarter_turn_squared() {
        // (x,y,z) ↦ (y,−x,z)
        let r = RigidMotion::new(
            [[qi(0), qi(1), qi(0)], [qi(-1), qi(0), qi(0)], [qi(0), qi(0), qi(1)]],
            [qi(0), qi(0), qi(0)],
        )
        .unwrap();
        let rr = r.compose(&r);
        let want = RigidMotion::new(
            [[qi(-1), qi(0), qi(0)], [qi(0), qi(-1), qi(0)], [qi(0), qi(0), qi(1)]],
            [qi(0), qi(0), qi(0)],
        )
        .unwrap();
        assert_eq!(rr, want);
    }

    #[test]
    fn d1_examples() {
        let id = identity_mat4();
        assert_eq!(d1(&id, &id), qi(0));
        let t = RigidMotion::translation([qi(1), qi(0), qi(0)]).to_mat4();
        assert_eq!(d1(&id, &t), qi(1));
        let rz = RigidMotion::new(
            [[qi(0), qi(-1), qi(0)], [qi(1), qi(0), qi(0)], [qi(0), qi(0), qi(1)]],
            [qi(0), qi(0), qi(0)],
        )
        .unwrap();
        assert_eq!(d1(&rz.to_mat4(), &id), qi(1));
    }

    #[test]
    fn quaternion_rotations_are_orthogonal() {
        for quat in [[1, 2, 3, 4], [2, -1, 0, 5], [0, 0, 0, 1], [3, 3, 3, 3]] {
            let m = RigidMotion::from_quaternion(quat, [qi(0), qi(0), qi(0)]).unwrap();
            assert!(RigidMotion::new(*m.linear(), [qi(0), qi(0), qi(0)]).is_ok());
            assert_eq!(m.to_int_affine().det(), m.to_int_affine().den.pow(3));
        }
        assert!(RigidMotion::new(
            [[qi(2), qi(0), qi(0)], [qi(0), qi(1), qi(0)], [qi(0), qi(0), qi(1)]],
            [qi(0), qi(0), qi(0)]
        )
        .is_err());
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = RigidMotion::from_quaternion([1, 2, 0, 0], [q(3, 8), q(-1, 3), qi(2)])
            .unwrap()
            .to_mat4();
        let s = format_mat4(&m);
        assert_eq!(parse_mat4(&s).unwrap(), m);
        assert_eq!(format_q(&q(3, 8)), "3/2^3");
        assert_eq!(format_q(&q(-1, 3)), "-1/3");
        assert!(parse_mat4("1 2 3").is_err());
    }
}
