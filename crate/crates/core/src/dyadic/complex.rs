use std::cmp::Ordering;

use super::cube::check_level;
use super::{CubeId, DyadicError, DyadicRational};

/// A finite union of same-level dyadic cubes, stored as a strictly increasing
/// list of cube coordinates (lexicographic `(x, y, z)` midpoint order).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicComplex {
    level: u32,
    cubes: Vec<[i64; 3]>,
}

impl DyadicComplex {
    pub fn empty(level: u32) -> Self {
        check_level(level).expect("level");
        Self {
            level,
            cubes: Vec::new(),
        }
    }

    /// All `8^level` cubes of `K₀`.
    pub fn full(level: u32) -> Self {
        CubeId::unit().into_complex().refine(level).expect("refine")
    }

    /// Builds a complex from cube coordinates in any order; duplicates collapse.
    pub fn from_coords(
        level: u32,
        coords: impl IntoIterator<Item = [i64; 3]>,
    ) -> Result<Self, DyadicError> {
        check_level(level)?;
        let mut cubes: Vec<[i64; 3]> = coords.into_iter().collect();
        cubes.sort_unstable();
        cubes.dedup();
        Ok(Self { level, cubes })
    }

    /// Like [`DyadicComplex::from_coords`] but every cube must lie in `K₀`.
    pub fn from_unit_coords(
        level: u32,
        coords: impl IntoIterator<Item = [i64; 3]>,
    ) -> Result<Self, DyadicError> {
        let c = Self::from_coords(level, coords)?;
        if let Some(bad) = c.cubes.iter().find(|&&x| !CubeId::extended(level, x).in_unit_cube()) {
            return Err(DyadicError::CoordOutOfRange { level, coords: *bad });
        }
        Ok(c)
    }

    /// Takes an already strictly increasing list.
    pub fn from_sorted(level: u32, cubes: Vec<[i64; 3]>) -> Result<Self, DyadicError> {
        check_level(level)?;
        if let Some(i) = cubes.windows(2).position(|w| w[0] >= w[1]) {
            return Err(DyadicError::NotStrictlyIncreasing { index: i + 1 });
        }
        Ok(Self { level, cubes })
    }

    pub(crate) fn from_sorted_unchecked(level: u32, cubes: Vec<[i64; 3]>) -> Self {
        debug_assert!(cubes.windows(2).all(|w| w[0] < w[1]));
        Self { level, cubes }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn coords(&self) -> &[[i64; 3]] {
        &self.cubes
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = CubeId> + '_ {
        self.cubes.iter().map(move |&c| CubeId::extended(self.level, c))
    }

    pub fn is_within_unit_cube(&self) -> bool {
        self.iter().all(|c| c.in_unit_cube())
    }

    /// The cubes lying in `K₀`.
    pub fn clip_to_unit_cube(&self) -> Self {
        let side = 1i64 << self.level;
        let cubes = self
            .cubes
            .iter()
            .filter(|c| c.iter().all(|&v| (0..side).contains(&v)))
            .copied()
            .collect();
        Self::from_sorted_unchecked(self.level, cubes)
    }

    pub fn contains_coords(&self, c: &[i64; 3]) -> bool {
        self.cubes.binary_search(c).is_ok()
    }

    /// Whether the cube (at any level) lies inside the point set.
    pub fn contains_cube(&self, cube: &CubeId) -> bool {
        if cube.level() >= self.level {
            self.contains_coords(&cube.ancestor(self.level).coords())
        } else {
            cube.descendants(self.level)
                .all(|d| self.contains_coords(&d.coords()))
        }
    }

    /// Exact measure `|cubes| · 8^(-level)`.
    pub fn measure(&self) -> DyadicRational {
        DyadicRational::new(self.cubes.len() as u64, 3 * self.level)
    }

    /// Same point set at a finer level.
    pub fn refine(&self, level: u32) -> Result<Self, DyadicError> {
        check_level(level)?;
        if level < self.level {
            return Err(DyadicError::LevelBelow {
                requested: level,
                current: self.level,
            });
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let d = level - self.level;
        let side = 1i64 << d;
        let mut out = Vec::with_capacity(self.cubes.len() << (3 * d));
        for &[a, b, c] in &self.cubes {
            for x in 0..side {
                for y in 0..side {
                    for z in 0..side {
                        out.push([(a << d) + x, (b << d) + y, (c << d) + z]);
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(Self { level, cubes: out })
    }

    fn at_common_level(&self, other: &Self) -> (Self, Self) {
        let l = self.level.max(other.level);
        (self.refine(l).expect("refine"), other.refine(l).expect("refine"))
    }

    pub fn union(&self, other: &Self) -> Self {
        let (a, b) = self.at_common_level(other);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a.cubes[i].cmp(&b.cubes[j]) {
                Ordering::Less => {
                    out.push(a.cubes[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b.cubes[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a.cubes[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a.cubes[i..]);
        out.extend_from_slice(&b.cubes[j..]);
        Self::from_sorted_unchecked(a.level, out)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = self.at_common_level(other);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a.cubes[i].cmp(&b.cubes[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push(a.cubes[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Self::from_sorted_unchecked(a.level, out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        let (a, b) = self.at_common_level(other);
        let mut out = Vec::new();
        let mut j = 0;
        for &c in &a.cubes {
            while j < b.len() && b.cubes[j] < c {
                j += 1;
            }
            if j < b.len() && b.cubes[j] == c {
                continue;
            }
            out.push(c);
        }
        Self::from_sorted_unchecked(a.level, out)
    }

    /// Point-set inclusion.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Whether the two point sets share a cube of positive measure.
    pub fn overlaps(&self, other: &Self) -> bool {
        !self.intersect(other).is_empty()
    }

    /// 0-based position of `c` in the canonical order.
    pub fn cube_rank(&self, c: &CubeId) -> Result<usize, DyadicError> {
        if c.level() != self.level {
            return Err(DyadicError::NotMember(*c));
        }
        self.cubes
            .binary_search(&c.coords())
            .map_err(|_| DyadicError::NotMember(*c))
    }

    /// Cubes of this complex contained in `k` (which may be coarser).
    pub fn restrict_to_cube(&self, k: &CubeId) -> Self {
        if k.level() > self.level {
            let refined = self.refine(k.level()).expect("refine");
            return refined.restrict_to_cube(k);
        }
        let (lo, hi) = k.span_at(self.level);
        let start = self.cubes.partition_point(|c| c[0] < lo[0]);
        let end = self.cubes.partition_point(|c| c[0] < hi[0]);
        let cubes = self.cubes[start..end]
            .iter()
            .filter(|c| (1..3).all(|i| c[i] >= lo[i] && c[i] < hi[i]))
            .copied()
            .collect();
        Self::from_sorted_unchecked(self.level, cubes)
    }

    /// Keeps, inside the `k`-th cube, exactly the level-`j` descendants whose
    /// rank is listed in `choices[k]`.
    pub fn select_children<S: AsRef<[u64]>>(
        &self,
        level: u32,
        choices: &[S],
    ) -> Result<Self, DyadicError> {
        check_level(level)?;
        if level < self.level {
            return Err(DyadicError::LevelBelow {
                requested: level,
                current: self.level,
            });
        }
        if choices.len() != self.cubes.len() {
            return Err(DyadicError::ChoiceLength {
                expected: self.cubes.len(),
                got: choices.len(),
            });
        }
        let limit = 1u64 << (3 * (level - self.level));
        let mut out = Vec::new();
        for (k, (parent, chosen)) in self.iter().zip(choices).enumerate() {
            for &r in chosen.as_ref() {
                if r >= limit {
                    return Err(DyadicError::ChoiceRange {
                        index: k,
                        rank: r,
                        limit,
                    });
                }
                out.push(parent.descendant(level, r).coords());
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self::from_sorted_unchecked(level, out))
    }

    /// For each cube in canonical order, the sorted ranks of this complex's
    /// descendants inside `parent` complex cubes. Inverse of `select_children`.
    pub fn child_choices(&self, parent: &Self) -> Result<Vec<Vec<u64>>, DyadicError> {
        if self.level < parent.level {
            return Err(DyadicError::LevelBelow {
                requested: self.level,
                current: parent.level,
            });
        }
        let mut out = vec![Vec::new(); parent.len()];
        for c in self.iter() {
            let anc = c.ancestor(parent.level);
            let k = parent
                .cube_rank(&anc)
                .map_err(|_| DyadicError::NotMember(c))?;
            out[k].push(anc.child_rank(&c).expect("descendant"));
        }
        for v in &mut out {
            v.sort_unstable();
        }
        Ok(out)
    }

    /// The `(level+2)`-cubes whose closed box lies in the topological
    /// interior of this complex's point set.
    pub fn interior_subcomplex(&self) -> Self {
        let level = self.level + 2;
        check_level(level).expect("interior level");
        let mut out = Vec::with_capacity(self.cubes.len() * 8);
        for &[a, b, c] in &self.cubes {
            // present[dx+1][dy+1][dz+1] for the 27 cells around this cube
            let mut present = [[[false; 3]; 3]; 3];
            for dx in -1..=1i64 {
                for dy in -1..=1i64 {
                    for dz in -1..=1i64 {
                        present[(dx + 1) as usize][(dy + 1) as usize][(dz + 1) as usize] =
                            (dx, dy, dz) == (0, 0, 0)
                                || self.contains_coords(&[a + dx, b + dy, c + dz]);
                    }
                }
            }
            // directions a child index touches: 0 -> {-1,0}, 3 -> {0,1}, else {0}
            let touch = |i: i64| -> &'static [i64] {
                match i {
                    0 => &[-1, 0],
                    3 => &[0, 1],
                    _ => &[0],
                }
            };
            for x in 0..4i64 {
                for y in 0..4i64 {
                    for z in 0..4i64 {
                        let inside = touch(x).iter().all(|&dx| {
                            touch(y).iter().all(|&dy| {
                                touch(z).iter().all(|&dz| {
                                    present[(dx + 1) as usize][(dy + 1) as usize]
                                        [(dz + 1) as usize]
                                })
                            })
                        });
                        if inside {
                            out.push([4 * a + x, 4 * b + y, 4 * c + z]);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        Self::from_sorted_unchecked(level, out)
    }

    /// `μ(F ∩ K) · 8^S`: the fraction of `K` covered by this complex.
    pub fn density_in_cube(&self, k: &CubeId) -> DyadicRational {
        if k.level() >= self.level {
            return if self.contains_coords(&k.ancestor(self.level).coords()) {
                DyadicRational::one()
            } else {
                DyadicRational::zero()
            };
        }
        let inside = self.restrict_to_cube(k).len();
        DyadicRational::new(inside as u64, 3 * (self.level - k.level()))
    }

    /// Smallest enclosing coordinate box `(min, max_exclusive)`; `None` if empty.
    pub fn bounding_coords(&self) -> Option<([i64; 3], [i64; 3])> {
        let first = self.cubes.first()?;
        let mut lo = *first;
        let mut hi = first.map(|v| v + 1);
        for c in &self.cubes {
            for i in 0..3 {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i] + 1);
            }
        }
        Some((lo, hi))
    }

    /// Translates every cube by an integer vector (in units of this level's side).
    pub fn shifted(&self, by: [i64; 3]) -> Self {
        let cubes = self
            .cubes
            .iter()
            .map(|c| [c[0] + by[0], c[1] + by[1], c[2] + by[2]])
            .collect();
        Self::from_sorted_unchecked(self.level, cubes)
    }
}

impl CubeId {
    pub fn into_complex(self) -> DyadicComplex {
        DyadicComplex::from_sorted_unchecked(self.level(), vec![self.coords()])
    }
}

impl From<CubeId> for DyadicComplex {
    fn from(c: CubeId) -> Self {
        c.into_complex()
    }
}
