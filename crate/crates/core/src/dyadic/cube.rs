use std::fmt;

use super::{DyadicError, DyadicRational, MAX_LEVEL};

/// A closed dyadic cube `[a/2^S,(a+1)/2^S] × [b/2^S,(b+1)/2^S] × [c/2^S,(c+1)/2^S]`.
///
/// Cubes built with [`CubeId::new`] lie in the unit cube. [`CubeId::extended`]
/// admits any integer coordinates, which is how translated copies outside
/// `[0,1]³` are carried.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeId {
    level: u32,
    coords: [i64; 3],
}

/// Axis-aligned box with exact corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeBox {
    pub min: [DyadicRational; 3],
    pub max: [DyadicRational; 3],
}

impl CubeId {
    pub fn new(level: u32, coords: [i64; 3]) -> Result<Self, DyadicError> {
        check_level(level)?;
        let side = 1i64 << level;
        if coords.iter().any(|&c| c < 0 || c >= side) {
            return Err(DyadicError::CoordOutOfRange { level, coords });
        }
        Ok(Self { level, coords })
    }

    pub fn extended(level: u32, coords: [i64; 3]) -> Self {
        assert!(level <= MAX_LEVEL, "level {level} exceeds {MAX_LEVEL}");
        Self { level, coords }
    }

    /// The unit cube `K₀`.
    pub fn unit() -> Self {
        Self {
            level: 0,
            coords: [0, 0, 0],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coords(&self) -> [i64; 3] {
        self.coords
    }

    pub fn in_unit_cube(&self) -> bool {
        let side = 1i64 << self.level;
        self.coords.iter().all(|&c| (0..side).contains(&c))
    }

    pub fn geometry(&self) -> CubeBox {
        let e = self.level;
        CubeBox {
            min: self.coords.map(|c| DyadicRational::new(c, e)),
            max: self.coords.map(|c| DyadicRational::new(c + 1, e)),
        }
    }

    /// Midpoint coordinates as numerators over `2^(level+1)`.
    pub fn midpoint_numerators(&self) -> [i64; 3] {
        self.coords.map(|c| 2 * c + 1)
    }

    /// The ancestor at a coarser (or equal) level.
    pub fn ancestor(&self, level: u32) -> CubeId {
        assert!(level <= self.level);
        let d = self.level - level;
        Self {
            level,
            coords: self.coords.map(|c| c >> d),
        }
    }

    /// Whether `other` (at this level or finer) is contained in `self`.
    pub fn contains(&self, other: &CubeId) -> bool {
        other.level >= self.level && other.ancestor(self.level) == *self
    }

    /// Rank of a descendant among the `8^(j-S)` descendants at its level,
    /// ordered lexicographically by midpoint `(x, y, z)`.
    pub fn child_rank(&self, child: &CubeId) -> Option<u64> {
        if !self.contains(child) {
            return None;
        }
        let d = child.level - self.level;
        let rel = [0, 1, 2].map(|i| (child.coords[i] - (self.coords[i] << d)) as u64);
        Some((rel[0] << (2 * d)) | (rel[1] << d) | rel[2])
    }

    /// Inverse of [`CubeId::child_rank`].
    pub fn descendant(&self, level: u32, rank: u64) -> CubeId {
        assert!(level >= self.level);
        let d = level - self.level;
        let mask = (1u64 << d) - 1;
        let rel = [(rank >> (2 * d)) & mask, (rank >> d) & mask, rank & mask];
        Self {
            level,
            coords: [0, 1, 2].map(|i| (self.coords[i] << d) + rel[i] as i64),
        }
    }

    /// All descendants at `level`, in canonical order.
    pub fn descendants(&self, level: u32) -> impl Iterator<Item = CubeId> + '_ {
        assert!(level >= self.level);
        let count = 1u64 << (3 * (level - self.level));
        (0..count).map(move |r| self.descendant(level, r))
    }

    /// Closed-set intersection test (shared faces, edges and corners count).
    pub fn closed_intersects(&self, other: &CubeId) -> bool {
        let l = self.level.max(other.level);
        let (a0, a1) = self.span_at(l);
        let (b0, b1) = other.span_at(l);
        (0..3).all(|i| a0[i] <= b1[i] && b0[i] <= a1[i])
    }

    /// Whether interiors intersect.
    pub fn interiors_intersect(&self, other: &CubeId) -> bool {
        let l = self.level.max(other.level);
        let (a0, a1) = self.span_at(l);
        let (b0, b1) = other.span_at(l);
        (0..3).all(|i| a0[i] < b1[i] && b0[i] < a1[i])
    }

    /// Corner coordinates `(min, max)` as numerators over `2^level`, `level >= self.level`.
    pub fn span_at(&self, level: u32) -> ([i64; 3], [i64; 3]) {
        let d = level - self.level;
        let lo = self.coords.map(|c| c << d);
        let hi = self.coords.map(|c| (c + 1) << d);
        (lo, hi)
    }
}

impl fmt::Display for CubeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L{}({},{},{})",
            self.level, self.coords[0], self.coords[1], self.coords[2]
        )
    }
}

pub(crate) fn check_level(level: u32) -> Result<(), DyadicError> {
    if level > MAX_LEVEL {
        Err(DyadicError::LevelTooLarge(level))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: i64, e: u32) -> DyadicRational {
        DyadicRational::new(n, e)
    }

    #[test]
    fn geometry_examples() {
        let g = CubeId::unit().geometry();
        assert_eq!(g.min, [d(0, 0), d(0, 0), d(0, 0)]);
        assert_eq!(g.max, [d(1, 0), d(1, 0), d(1, 0)]);

        let g = CubeId::new(1, [1, 0, 0]).unwrap().geometry();
        assert_eq!(g.min, [d(1, 1), d(0, 0), d(0, 0)]);
        assert_eq!(g.max, [d(1, 0), d(1, 1), d(1, 1)]);

        let g = CubeId::new(2, [3, 3, 3]).unwrap().geometry();
        assert_eq!(g.min, [d(3, 2), d(3, 2), d(3, 2)]);
        assert_eq!(g.max, [d(1, 0), d(1, 0), d(1, 0)]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(CubeId::new(1, [2, 0, 0]).is_err());
        assert!(CubeId::new(1, [0, -1, 0]).is_err());
        assert!(!CubeId::extended(1, [2, 0, 0]).in_unit_cube());
    }

    #[test]
    fn rank_round_trip() {
        let k = CubeId::new(1, [1, 0, 1]).unwrap();
        for r in 0..64 {
            let c = k.descendant(3, r);
            assert!(k.contains(&c));
            assert_eq!(k.child_rank(&c), Some(r));
        }
        let first = k.descendant(2, 0);
        assert_eq!(first.coords(), [2, 0, 2]);
        assert_eq!(k.descendant(2, 1).coords(), [2, 0, 3]);
        assert_eq!(k.descendant(2, 2).coords(), [2, 1, 2]);
    }

    #[test]
    fn contact_predicates() {
        let a = CubeId::new(2, [0, 0, 0]).unwrap();
        let b = CubeId::new(2, [1, 1, 0]).unwrap();
        let c = CubeId::new(2, [2, 0, 0]).unwrap();
        assert!(a.closed_intersects(&b));
        assert!(!a.interiors_intersect(&b));
        assert!(!a.closed_intersects(&c));
        let big = CubeId::new(1, [0, 0, 0]).unwrap();
        assert!(big.interiors_intersect(&b));
        assert!(big.closed_intersects(&c));
    }
}
