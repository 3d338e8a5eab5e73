//! Exact volume of the intersection of a transformed cube with axis boxes,
//! by half-space clipping of a rational convex polyhedron.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::matrix::IntAffine;
use super::sat::{cross, dot, AxisBox, BoxContact, Frame, Parallelepiped};
use crate::dyadic::{CubeId, DyadicComplex};

type P = [BigRational; 3];

fn big(v: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn bdot(n: &[BigRational; 3], p: &P) -> BigRational {
    &n[0] * &p[0] + &n[1] * &p[1] + &n[2] * &p[2]
}

fn sub(a: &P, b: &P) -> P {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn det3(a: &P, b: &P, c: &P) -> BigRational {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// Convex polyhedron as a list of planar faces, each a cyclic vertex list.
struct Polytope {
    faces: Vec<Vec<P>>,
}

impl Polytope {
    fn from_box(b: &AxisBox) -> Self {
        let v = |mask: usize| -> P {
            [0, 1, 2].map(|i| big(if mask >> i & 1 == 1 { b.hi[i] } else { b.lo[i] }))
        };
        // Corner masks around each face, cyclic.
        const FACES: [[usize; 4]; 6] = [
            [0, 2, 6, 4],
            [1, 5, 7, 3],
            [0, 4, 5, 1],
            [2, 3, 7, 6],
            [0, 1, 3, 2],
            [4, 6, 7, 5],
        ];
        Self {
            faces: FACES.iter().map(|f| f.iter().map(|&m| v(m)).collect()).collect(),
        }
    }

    /// Keeps the part with `n·x <= c`.
    fn clip(&mut self, n: &[BigRational; 3], c: &BigRational) {
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        let mut on_plane: Vec<P> = Vec::new();
        let mut coplanar_face = false;
        for face in &self.faces {
            let mut out: Vec<P> = Vec::with_capacity(face.len() + 1);
            let k = face.len();
            for i in 0..k {
                let p = &face[i];
                let q = &face[(i + 1) % k];
                let sp = bdot(n, p) - c;
                let sq = bdot(n, q) - c;
                if !sp.is_positive() {
                    out.push(p.clone());
                }
                if (sp.is_negative() && sq.is_positive()) || (sp.is_positive() && sq.is_negative()) {
                    let t = &sp / (&sp - &sq);
                    let d = sub(q, p);
                    out.push([0, 1, 2].map(|j| &p[j] + &t * &d[j]));
                }
            }
            out.dedup();
            if out.len() > 1 && out.first() == out.last() {
                out.pop();
            }
            let mut all_on = true;
            for v in &out {
                if (bdot(n, v) - c).is_zero() {
                    on_plane.push(v.clone());
                } else {
                    all_on = false;
                }
            }
            if out.len() >= 3 {
                coplanar_face |= all_on;
                faces.push(out);
            }
        }
        if !coplanar_face {
            on_plane.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            on_plane.dedup();
            if on_plane.len() >= 3 {
                faces.push(order_cyclic(on_plane, n));
            }
        }
        self.faces = faces;
    }

    fn volume(&self) -> BigRational {
        let mut count = 0usize;
        let mut c: P = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
        for f in &self.faces {
            for v in f {
                for j in 0..3 {
                    c[j] += &v[j];
                }
                count += 1;
            }
        }
        if count == 0 {
            return BigRational::zero();
        }
        let cnt = big(count as i128);
        let c = c.map(|x| x / &cnt);
        let mut total = BigRational::zero();
        for f in &self.faces {
            let a = sub(&f[0], &c);
            for w in f[1..].windows(2) {
                total += det3(&a, &sub(&w[0], &c), &sub(&w[1], &c)).abs();
            }
        }
        total / big(6)
    }
}

/// Orders coplanar points of a convex polygon cyclically.
fn order_cyclic(mut pts: Vec<P>, n: &[BigRational; 3]) -> Vec<P> {
    // Drop the coordinate where the normal is largest; the projection is injective.
    let drop = (0..3)
        .max_by(|&i, &j| n[i].abs().cmp(&n[j].abs()))
        .expect("three axes");
    let (ax, ay) = match drop {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let cnt = big(pts.len() as i128);
    let cx = pts.iter().map(|p| p[ax].clone()).fold(BigRational::zero(), |a, b| a + b) / &cnt;
    let cy = pts.iter().map(|p| p[ay].clone()).fold(BigRational::zero(), |a, b| a + b) / &cnt;
    let half = |x: &BigRational, y: &BigRational| y.is_negative() || (y.is_zero() && x.is_negative());
    pts.sort_by(|p, q| {
        let (px, py) = (&p[ax] - &cx, &p[ay] - &cy);
        let (qx, qy) = (&q[ax] - &cx, &q[ay] - &cy);
        let (hp, hq) = (half(&px, &py), half(&qx, &qy));
        if hp != hq {
            return hp.cmp(&hq);
        }
        let cr = &px * &qy - &py * &qx;
        if cr.is_positive() {
            Ordering::Less
        } else if cr.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    });
    pts
}

/// Half-spaces `n·x <= c` describing a non-degenerate parallelepiped.
fn halfspaces(par: &Parallelepiped) -> Vec<([i128; 3], i128)> {
    let e = &par.edges;
    let rows = [cross(&e[1], &e[2]), cross(&e[2], &e[0]), cross(&e[0], &e[1])];
    let det = dot(&rows[0], &e[0]);
    let mut out = Vec::with_capacity(6);
    for r in rows {
        let base = dot(&r, &par.origin);
        let (lo, hi) = if det > 0 { (base, base + det) } else { (base + det, base) };
        out.push((r, hi));
        out.push((r.map(|v| -v), -lo));
    }
    out
}

fn inside(hs: &[([i128; 3], i128)], p: &[i128; 3]) -> bool {
    hs.iter().all(|(n, c)| dot(n, p) <= *c)
}

/// Volume of `par ∩ b` in frame units cubed.
fn frame_volume(par: &Parallelepiped, b: &AxisBox) -> BigRational {
    if par.singular || par.classify(b) != BoxContact::Overlapping {
        return BigRational::zero();
    }
    let hs = halfspaces(par);
    let corners: Vec<[i128; 3]> = (0..8)
        .map(|m| [0, 1, 2].map(|i| if m >> i & 1 == 1 { b.hi[i] } else { b.lo[i] }))
        .collect();
    if corners.iter().all(|c| inside(&hs, c)) {
        return big((0..3).map(|i| b.hi[i] - b.lo[i]).product());
    }
    if par
        .vertices()
        .iter()
        .all(|v| (0..3).all(|i| b.lo[i] <= v[i] && v[i] <= b.hi[i]))
    {
        let e = &par.edges;
        return big(dot(&cross(&e[1], &e[2]), &e[0]).abs());
    }
    let mut poly = Polytope::from_box(b);
    for (n, c) in &hs {
        poly.clip(&n.map(big), &big(*c));
        if poly.faces.is_empty() {
            return BigRational::zero();
        }
    }
    poly.volume()
}

/// Exact volume of `g(source) ∩ target`.
pub fn clipped_volume(g: &IntAffine, source: &CubeId, target: &CubeId) -> BigRational {
    let frame = Frame::new(g, source.level().max(target.level()));
    let v = frame_volume(&frame.image(g, source), &frame.cube_box(target));
    let s = big(frame.scale());
    v / (&s * &s * &s)
}

/// Exact volume of `g(B) ∩ K` for complexes `B` and `K`.
pub fn image_volume_in_complex(g: &IntAffine, b: &DyadicComplex, k: &DyadicComplex) -> BigRational {
    let level = b.level().max(k.level());
    let frame = Frame::new(g, level);
    let cell = frame.scale() >> k.level();
    let mut total = BigRational::zero();
    for src in b.iter() {
        let par = frame.image(g, &src);
        let bb = par.bounds();
        let r = [0, 1, 2].map(|i| {
            (bb.lo[i].div_euclid(cell) as i64)..=((bb.hi[i] - 1).div_euclid(cell) as i64)
        });
        for x in r[0].clone() {
            for y in r[1].clone() {
                for z in r[2].clone() {
                    if k.contains_coords(&[x, y, z]) {
                        let t = CubeId::extended(k.level(), [x, y, z]);
                        total += frame_volume(&par, &frame.cube_box(&t));
                    }
                }
            }
        }
    }
    let s = big(frame.scale());
    total / (&s * &s * &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motions::matrix::{q, qi, RigidMotion};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn translated_box_overlap() {
        let g = RigidMotion::translation([q(3, 8), qi(0), qi(0)]).to_int_affine();
        let s = CubeId::extended(2, [0, 0, 0]);
        let t = CubeId::extended(2, [1, 0, 0]);
        // overlap [3/8,1/2]×[0,1/4]² = 1/8 · 1/16
        assert_eq!(clipped_volume(&g, &s, &t), r(1, 128));
        assert_eq!(clipped_volume(&g, &s, &s), r(0, 1));
        assert_eq!(clipped_volume(&g, &CubeId::extended(1, [0, 0, 0]), &t), r(1, 128));
    }

    #[test]
    fn identity_and_containment() {
        let id = IntAffine::identity();
        let unit = CubeId::unit();
        let small = CubeId::extended(2, [1, 2, 3]);
        assert_eq!(clipped_volume(&id, &unit, &unit), r(1, 1));
        assert_eq!(clipped_volume(&id, &small, &unit), r(1, 64));
        assert_eq!(clipped_volume(&id, &unit, &small), r(1, 64));
    }

    #[test]
    fn rotated_cube_against_unit_cube() {
        // 90° about z then shifted back into place: exact self-map of K₀.
        let g = RigidMotion::from_quaternion([1, 0, 0, 1], [qi(1), qi(0), qi(0)])
            .unwrap()
            .to_int_affine();
        let unit = CubeId::unit();
        assert_eq!(clipped_volume(&g, &unit, &unit), r(1, 1));
        // Half-shifted along x: half the cube remains.
        let g = RigidMotion::from_quaternion([1, 0, 0, 1], [q(3, 2), qi(0), qi(0)])
            .unwrap()
            .to_int_affine();
        assert_eq!(clipped_volume(&g, &unit, &unit), r(1, 2));
    }

    #[test]
    fn oblique_volume_is_partition_consistent() {
        // Volumes of g(K₀) against the 8 level-1 cubes and their complement
        // must sum to the full image volume.
        let g = RigidMotion::from_quaternion([3, 1, 2, 1], [q(1, 3), q(1, 5), q(1, 7)])
            .unwrap()
            .to_int_affine();
        let unit = CubeId::unit();
        let whole = DyadicComplex::from_coords(1, (-4..6).flat_map(|x| {
            (-4..6).flat_map(move |y| (-4..6).map(move |z| [x, y, z]))
        }))
        .unwrap();
        let total = image_volume_in_complex(&g, &unit.into_complex(), &whole);
        assert_eq!(total, r(1, 1));
        let parts: BigRational = unit
            .descendants(1)
            .map(|c| clipped_volume(&g, &unit, &c))
            .fold(BigRational::zero(), |a, b| a + b);
        let direct = clipped_volume(&g, &unit, &unit);
        assert_eq!(parts, direct);
        assert!(direct > BigRational::zero() && direct < r(1, 1));
    }
}
