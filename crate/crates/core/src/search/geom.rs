//! Exact box predicates for cubes under dyadic motions, in integer units of
//! a common working level.

use crate::dyadic::{CubeId, DyadicComplex};
use crate::motions::DyadicMotion;

/// Closed axis-aligned box `[lo, hi]` in units of `2^-level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntBox {
    pub level: u32,
    pub lo: [i64; 3],
    pub hi: [i64; 3],
}

impl IntBox {
    pub fn of_cube(c: &CubeId, level: u32) -> Self {
        assert!(level >= c.level());
        let s = 1i64 << (level - c.level());
        let k = c.coords();
        Self {
            level,
            lo: k.map(|v| v * s),
            hi: k.map(|v| (v + 1) * s),
        }
    }

    pub fn rescale(&self, level: u32) -> Self {
        assert!(level >= self.level);
        let s = 1i64 << (level - self.level);
        Self {
            level,
            lo: self.lo.map(|v| v * s),
            hi: self.hi.map(|v| v * s),
        }
    }

    /// Closed sets intersect.
    pub fn meets(&self, other: &Self) -> bool {
        let (a, b) = same_level(self, other);
        (0..3).all(|i| a.lo[i] <= b.hi[i] && b.lo[i] <= a.hi[i])
    }

    /// Interiors intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        let (a, b) = same_level(self, other);
        (0..3).all(|i| a.lo[i] < b.hi[i] && b.lo[i] < a.hi[i])
    }
}

fn same_level(a: &IntBox, b: &IntBox) -> (IntBox, IntBox) {
    let l = a.level.max(b.level);
    (a.rescale(l), b.rescale(l))
}

/// Level at which both `c` and the image `m(c)` have integral corners.
pub fn working_level(m: &DyadicMotion, c: &CubeId) -> u32 {
    c.level().max(m.resolution())
}

/// The box `m(c)`.
pub fn image_box(m: &DyadicMotion, c: &CubeId) -> IntBox {
    let level = working_level(m, c);
    let b = IntBox::of_cube(c, level);
    let t = m.translation_numerators(level).expect("integral at working level");
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for i in 0..3 {
        let j = m.perm.source_axis(i);
        if m.perm.sign(i) > 0 {
            lo[i] = b.lo[j] + t[i];
            hi[i] = b.hi[j] + t[i];
        } else {
            lo[i] = -b.hi[j] + t[i];
            hi[i] = -b.lo[j] + t[i];
        }
    }
    IntBox { level, lo, hi }
}

/// Whether some closed cube of `x` meets the closed box `b`.
pub fn complex_meets_box(x: &DyadicComplex, b: &IntBox) -> bool {
    first_meeting_cube(x, b).is_some()
}

/// First cube of `x` (canonical order) whose closed cell meets `b`.
pub fn first_meeting_cube(x: &DyadicComplex, b: &IntBox) -> Option<CubeId> {
    let level = x.level().max(b.level);
    let b = b.rescale(level);
    let s = 1i64 << (level - x.level());
    // cell c meets [lo, hi] iff c·s ≤ hi and (c+1)·s ≥ lo
    let range = |i: usize| (b.lo[i].div_euclid(s) - i64::from(b.lo[i].rem_euclid(s) == 0), b.hi[i].div_euclid(s));
    let (x0, x1) = range(0);
    let (y0, y1) = range(1);
    let (z0, z1) = range(2);
    let coords = x.coords();
    let start = coords.partition_point(|c| c[0] < x0);
    let end = coords.partition_point(|c| c[0] <= x1);
    coords[start..end]
        .iter()
        .find(|c| c[1] >= y0 && c[1] <= y1 && c[2] >= z0 && c[2] <= z1)
        .map(|c| CubeId::extended(x.level(), *c))
}
