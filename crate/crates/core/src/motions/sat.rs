//! Exact separating-axis tests between the affine image of a dyadic cube and
//! an axis-aligned dyadic box.
//!
//! All coordinates are integers over a common scale `den · 2^L`, so every
//! projection is an exact `i128`. For convex polytopes the three box normals,
//! the three face normals of the parallelepiped and the nine edge cross
//! products are a complete set of candidate axes, both for strict and for
//! weak separation.

use super::matrix::IntAffine;
use crate::dyadic::CubeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoxContact {
    /// The closed sets are disjoint.
    Disjoint,
    /// They meet, but the intersection has zero volume.
    Touching,
    /// The intersection has positive volume.
    Overlapping,
}

impl BoxContact {
    pub fn meets(self) -> bool {
        self != BoxContact::Disjoint
    }
}

/// `g(source)` as origin plus three edge vectors.
#[derive(Clone, Debug)]
pub(crate) struct Parallelepiped {
    pub origin: [i128; 3],
    pub edges: [[i128; 3]; 3],
    pub singular: bool,
}

/// Closed axis box `[lo, hi]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AxisBox {
    pub lo: [i128; 3],
    pub hi: [i128; 3],
}

/// Integer frame shared by a map and a working level: a point `x` is
/// represented by `x · den · 2^level`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame {
    pub den: i128,
    pub level: u32,
}

impl Frame {
    pub fn new(g: &IntAffine, level: u32) -> Self {
        Self { den: g.den, level }
    }

    pub fn scale(&self) -> i128 {
        self.den << self.level
    }

    /// Box of a cube at level `<= self.level`.
    pub fn cube_box(&self, c: &CubeId) -> AxisBox {
        let shift = self.level - c.level();
        let side = self.den << shift;
        let a = c.coords();
        let lo = a.map(|v| v as i128 * side);
        AxisBox {
            lo,
            hi: lo.map(|v| v + side),
        }
    }

    /// Image of a cube at level `<= self.level`.
    pub fn image(&self, g: &IntAffine, c: &CubeId) -> Parallelepiped {
        let shift = self.level - c.level();
        let a = c.coords().map(|v| (v as i128) << shift);
        let origin = [0, 1, 2].map(|i| {
            g.m[i][0] * a[0] + g.m[i][1] * a[1] + g.m[i][2] * a[2] + (g.t[i] << self.level)
        });
        let edges = [0, 1, 2].map(|j| g.column(j).map(|v| v << shift));
        Parallelepiped {
            origin,
            edges,
            singular: g.det() == 0,
        }
    }
}

pub(crate) fn dot(a: &[i128; 3], b: &[i128; 3]) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &[i128; 3], b: &[i128; 3]) -> [i128; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn reduce(v: [i128; 3]) -> [i128; 3] {
    let g = v.iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
    if g > 1 {
        v.map(|x| x / g)
    } else {
        v
    }
}

const E: [[i128; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// The candidate separating axes for a parallelepiped with the given edge
/// directions against an axis box. Zero vectors are dropped; each axis is
/// divided by its content to keep later products small.
pub(crate) fn candidate_axes(edges: &[[i128; 3]; 3]) -> Vec<[i128; 3]> {
    let mut axes = Vec::with_capacity(15);
    axes.extend(E);
    for (j, k) in [(1, 2), (2, 0), (0, 1)] {
        axes.push(cross(&edges[j], &edges[k]));
    }
    for e in edges {
        for u in &E {
            axes.push(cross(e, u));
        }
    }
    axes.retain(|a| *a != [0, 0, 0]);
    axes.into_iter().map(reduce).collect()
}

impl Parallelepiped {
    pub fn project(&self, u: &[i128; 3]) -> (i128, i128) {
        let base = dot(&self.origin, u);
        let (mut lo, mut hi) = (base, base);
        for e in &self.edges {
            let d = dot(e, u);
            if d < 0 {
                lo += d;
            } else {
                hi += d;
            }
        }
        (lo, hi)
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> AxisBox {
        let mut lo = [0i128; 3];
        let mut hi = [0i128; 3];
        for i in 0..3 {
            let (l, h) = self.project(&E[i]);
            lo[i] = l;
            hi[i] = h;
        }
        AxisBox { lo, hi }
    }

    pub fn vertices(&self) -> [[i128; 3]; 8] {
        let mut out = [[0i128; 3]; 8];
        for (mask, v) in out.iter_mut().enumerate() {
            *v = self.origin;
            for (j, e) in self.edges.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    for i in 0..3 {
                        v[i] += e[i];
                    }
                }
            }
        }
        out
    }

    pub fn classify(&self, b: &AxisBox) -> BoxContact {
        let mut touching = self.singular;
        for u in candidate_axes(&self.edges) {
            let (plo, phi) = self.project(&u);
            let (blo, bhi) = b.project(&u);
            if phi < blo || bhi < plo {
                return BoxContact::Disjoint;
            }
            if phi == blo || bhi == plo {
                touching = true;
            }
        }
        if touching {
            BoxContact::Touching
        } else {
            BoxContact::Overlapping
        }
    }
}

impl AxisBox {
    pub fn project(&self, u: &[i128; 3]) -> (i128, i128) {
        let (mut lo, mut hi) = (0i128, 0i128);
        for i in 0..3 {
            if u[i] < 0 {
                lo += u[i] * self.hi[i];
                hi += u[i] * self.lo[i];
            } else {
                lo += u[i] * self.lo[i];
                hi += u[i] * self.hi[i];
            }
        }
        (lo, hi)
    }
}

/// Classifies `g(source)` against `target` exactly.
pub fn oriented_box_meets_cube(g: &IntAffine, source: &CubeId, target: &CubeId) -> BoxContact {
    let frame = Frame::new(g, source.level().max(target.level()));
    frame.image(g, source).classify(&frame.cube_box(target))
}
