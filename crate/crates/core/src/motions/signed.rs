use std::fmt;

use num_traits::{One, Zero};

use super::matrix::{format_mat4, q_from_dyadic, IntAffine, Mat4, RigidMotion, Q};
use super::MotionError;
use crate::dyadic::{CubeId, DyadicComplex, DyadicRational};

const PERMS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// One of the 48 symmetries of the cube about the origin: `(Px)_i = ±x_{perm[i]}`.
///
/// Indexed `0..48` as `8`·permutation-index + sign mask, so index 0 is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPerm {
    perm: [u8; 3],
    neg: u8,
}

impl SignedPerm {
    pub const COUNT: usize = 48;

    pub fn identity() -> Self {
        Self {
            perm: [0, 1, 2],
            neg: 0,
        }
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < Self::COUNT);
        Self {
            perm: PERMS[index / 8],
            neg: (index % 8) as u8,
        }
    }

    pub fn index(&self) -> usize {
        let p = PERMS.iter().position(|p| *p == self.perm).expect("valid perm");
        p * 8 + self.neg as usize
    }

    pub fn all() -> impl Iterator<Item = SignedPerm> {
        (0..Self::COUNT).map(Self::from_index)
    }

    /// Builds from a matrix given as `(column, sign)` per row.
    pub fn from_rows(rows: [(u8, i8); 3]) -> Option<Self> {
        let perm = rows.map(|r| r.0);
        if !PERMS.contains(&perm) || rows.iter().any(|r| r.1 != 1 && r.1 != -1) {
            return None;
        }
        let neg = (0..3).fold(0u8, |acc, i| acc | (((rows[i].1 < 0) as u8) << i));
        Some(Self { perm, neg })
    }

    pub fn source_axis(&self, i: usize) -> usize {
        self.perm[i] as usize
    }

    pub fn sign(&self, i: usize) -> i64 {
        if self.neg >> i & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply_int(&self, x: [i64; 3]) -> [i64; 3] {
        [0, 1, 2].map(|i| self.sign(i) * x[self.source_axis(i)])
    }

    /// Lower corner of the image of the unit cell with lower corner `a`.
    pub fn image_cell(&self, a: [i64; 3]) -> [i64; 3] {
        [0, 1, 2].map(|i| {
            let v = a[self.source_axis(i)];
            if self.sign(i) > 0 {
                v
            } else {
                -v - 1
            }
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        // (self(other x))_i = s_i * (other x)_{p_i} = s_i * s'_{p_i} * x_{p'_{p_i}}
        let rows = [0, 1, 2].map(|i| {
            let j = self.source_axis(i);
            (
                other.perm[j],
                (self.sign(i) * other.sign(j)) as i8,
            )
        });
        Self::from_rows(rows).expect("composition of signed perms")
    }

    pub fn inverse(&self) -> Self {
        let mut rows = [(0u8, 1i8); 3];
        for i in 0..3 {
            rows[self.source_axis(i)] = (i as u8, self.sign(i) as i8);
        }
        Self::from_rows(rows).expect("inverse of signed perm")
    }

    pub fn matrix(&self) -> [[i64; 3]; 3] {
        let mut m = [[0i64; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[self.source_axis(i)] = self.sign(i);
        }
        m
    }
}

/// `x ↦ P·x + t` with `P` a cube symmetry and `t` dyadic. Maps dyadic
/// `j`-cubes to dyadic `j`-cubes whenever `2^j·t` is integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicMotion {
    pub perm: SignedPerm,
    pub trans: [DyadicRational; 3],
}

impl DyadicMotion {
    pub fn new(perm: SignedPerm, trans: [DyadicRational; 3]) -> Self {
        Self { perm, trans }
    }

    pub fn identity() -> Self {
        Self::translation([DyadicRational::zero(), DyadicRational::zero(), DyadicRational::zero()])
    }

    pub fn translation(trans: [DyadicRational; 3]) -> Self {
        Self {
            perm: SignedPerm::identity(),
            trans,
        }
    }

    /// Translation by `v / 2^level`.
    pub fn translation_at(level: u32, v: [i64; 3]) -> Self {
        Self::translation(v.map(|c| DyadicRational::new(c, level)))
    }

    /// Translation by `(1, 0, 0)`.
    pub fn unit_x() -> Self {
        Self::translation_at(0, [1, 0, 0])
    }

    pub fn is_identity(&self) -> bool {
        self.perm.is_identity() && self.trans.iter().all(|t| t.is_zero())
    }

    /// `2^level · t` if integral.
    pub fn translation_numerators(&self, level: u32) -> Option<[i64; 3]> {
        let mut out = [0i64; 3];
        for (slot, t) in out.iter_mut().zip(&self.trans) {
            if t.exponent() > level {
                return None;
            }
            let n = t.scaled_numerator(level);
            *slot = i64::try_from(&n).ok()?;
        }
        Some(out)
    }

    /// Smallest level at which the translation is integral.
    pub fn resolution(&self) -> u32 {
        self.trans.iter().map(|t| t.exponent()).max().unwrap_or(0)
    }

    pub fn apply(&self, x: &[DyadicRational; 3]) -> [DyadicRational; 3] {
        [0, 1, 2].map(|i| {
            let v = &x[self.perm.source_axis(i)];
            let v = if self.perm.sign(i) > 0 { v.clone() } else { -v };
            &v + &self.trans[i]
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = self.perm.compose(&other.perm);
        let moved = self.apply(&other.trans);
        Self { perm, trans: moved }
    }

    pub fn inverse(&self) -> Self {
        let inv = self.perm.inverse();
        let lin_only = Self {
            perm: inv,
            trans: [DyadicRational::zero(), DyadicRational::zero(), DyadicRational::zero()],
        };
        let t = lin_only.apply(&self.trans).map(|v| -v);
        Self { perm: inv, trans: t }
    }

    pub fn image_cube(&self, c: &CubeId) -> Result<CubeId, MotionError> {
        let t = self
            .translation_numerators(c.level())
            .ok_or(MotionError::NonIntegralTranslation { level: c.level() })?;
        let base = self.perm.image_cell(c.coords());
        Ok(CubeId::extended(
            c.level(),
            [base[0] + t[0], base[1] + t[1], base[2] + t[2]],
        ))
    }

    /// Exact image of a complex. Cubes leaving `K₀` are kept with extended coordinates.
    pub fn apply_to_complex(&self, x: &DyadicComplex) -> Result<DyadicComplex, MotionError> {
        let level = x.level();
        let t = self
            .translation_numerators(level)
            .ok_or(MotionError::NonIntegralTranslation { level })?;
        let coords = x.coords().iter().map(|&c| {
            let b = self.perm.image_cell(c);
            [b[0] + t[0], b[1] + t[1], b[2] + t[2]]
        });
        Ok(DyadicComplex::from_coords(level, coords).expect("same level"))
    }

    /// Image intersected with `K₀`.
    pub fn apply_clipped(&self, x: &DyadicComplex) -> Result<DyadicComplex, MotionError> {
        let img = self.apply_to_complex(x)?;
        Ok(img.clip_to_unit_cube())
    }

    pub fn to_mat4(&self) -> Mat4 {
        let mut m: Mat4 = Default::default();
        let p = self.perm.matrix();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = Q::from_integer(p[i][j] as i128);
            }
            m[i][3] = q_from_dyadic(&self.trans[i]);
        }
        m[3][3] = Q::one();
        m
    }

    pub fn to_rigid(&self) -> RigidMotion {
        RigidMotion::from_mat4(&self.to_mat4()).expect("signed perms are orthogonal")
    }

    pub fn to_int_affine(&self) -> IntAffine {
        IntAffine::from_mat4(&self.to_mat4()).expect("bottom row")
    }

    /// Recognises a homogeneous matrix that is a cube symmetry plus a dyadic translation.
    pub fn from_mat4(m: &Mat4) -> Option<Self> {
        if m[3][0] != Q::zero() || m[3][1] != Q::zero() || m[3][2] != Q::zero() || m[3][3] != Q::one()
        {
            return None;
        }
        let mut rows = [(0u8, 1i8); 3];
        for (i, row) in rows.iter_mut().enumerate() {
            let nz: Vec<usize> = (0..3).filter(|&j| !m[i][j].is_zero()).collect();
            if nz.len() != 1 {
                return None;
            }
            let v = m[i][nz[0]];
            *row = if v == Q::one() {
                (nz[0] as u8, 1)
            } else if v == -Q::one() {
                (nz[0] as u8, -1)
            } else {
                return None;
            };
        }
        let perm = SignedPerm::from_rows(rows)?;
        let mut trans = [DyadicRational::zero(), DyadicRational::zero(), DyadicRational::zero()];
        for i in 0..3 {
            let v = m[i][3];
            let d = *v.denom();
            if d.count_ones() != 1 {
                return None;
            }
            trans[i] = DyadicRational::new(*v.numer(), d.trailing_zeros());
        }
        Some(Self { perm, trans })
    }
}

impl fmt::Display for DyadicMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_mat4(&self.to_mat4()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dr(n: i64, e: u32) -> DyadicRational {
        DyadicRational::new(n, e)
    }

    #[test]
    fn perm_indexing() {
        assert!(SignedPerm::from_index(0).is_identity());
        let all: Vec<_> = SignedPerm::all().collect();
        assert_eq!(all.len(), 48);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(p.index(), i);
            assert!(p.compose(&p.inverse()).is_identity());
        }
        let mut uniq = all.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 48);
    }

    #[test]
    fn perm_composition_matches_matrices() {
        for a in SignedPerm::all() {
            for b in SignedPerm::all().step_by(5) {
                let x = [3, -7, 11];
                assert_eq!(a.compose(&b).apply_int(x), a.apply_int(b.apply_int(x)));
            }
        }
    }

    #[test]
    fn translation_moves_cube() {
        let m = DyadicMotion::translation_at(1, [1, 0, 0]);
        let c = CubeId::new(1, [0, 0, 0]).unwrap();
        assert_eq!(m.image_cube(&c).unwrap().coords(), [1, 0, 0]);
        let x = DyadicComplex::from_coords(1, [[0, 0, 0], [0, 1, 1]]).unwrap();
        assert_eq!(DyadicMotion::identity().apply_to_complex(&x).unwrap(), x);
    }

    #[test]
    fn quarter_turn_about_centre() {
        // (x,y,z) ↦ (1−y, x, z)
        let p = SignedPerm::from_rows([(1, -1), (0, 1), (2, 1)]).unwrap();
        let m = DyadicMotion::new(p, [dr(1, 0), dr(0, 0), dr(0, 0)]);
        let c = CubeId::new(1, [0, 0, 0]).unwrap();
        assert_eq!(m.image_cube(&c).unwrap().coords(), [1, 0, 0]);
    }

    #[test]
    fn non_integral_translation_is_rejected() {
        let m = DyadicMotion::translation_at(2, [1, 0, 0]);
        let x = DyadicComplex::full(1);
        assert!(matches!(
            m.apply_to_complex(&x),
            Err(MotionError::NonIntegralTranslation { level: 1 })
        ));
        assert!(m.apply_to_complex(&x.refine(2).unwrap()).is_ok());
    }

    #[test]
    fn compose_inverse_and_matrix_forms() {
        let p = SignedPerm::from_index(29);
        let m = DyadicMotion::new(p, [dr(3, 2), dr(-1, 1), dr(5, 3)]);
        assert!(m.compose(&m.inverse()).is_identity());
        let back = DyadicMotion::from_mat4(&m.to_mat4()).unwrap();
        assert_eq!(back, m);
        assert_eq!(m.to_rigid().to_mat4(), m.to_mat4());
        let n = DyadicMotion::new(SignedPerm::from_index(7), [dr(1, 2), dr(0, 0), dr(1, 0)]);
        assert_eq!(
            m.compose(&n).to_mat4(),
            m.to_rigid().compose(&n.to_rigid()).to_mat4()
        );
    }

    #[test]
    fn clipped_image_drops_outside_cubes() {
        let x = DyadicComplex::full(1);
        let img = DyadicMotion::unit_x().apply_clipped(&x).unwrap();
        assert!(img.is_empty());
        let half = DyadicMotion::translation_at(1, [1, 0, 0]).apply_clipped(&x).unwrap();
        assert_eq!(half.len(), 4);
    }
}
