use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use super::matrix::{IntAffine, Q};
use super::sat::{candidate_axes, dot, AxisBox, BoxContact, Frame, Parallelepiped};
use crate::dyadic::{CubeId, DyadicComplex};

/// Range of level-`n` cube indices whose closed cells can meet `[lo, hi]`,
/// where one cell has side `cell` in frame units.
fn cell_range(lo: i128, hi: i128, cell: i128) -> std::ops::RangeInclusive<i64> {
    let first = lo.div_euclid(cell) - i128::from(lo.rem_euclid(cell) == 0);
    let last = hi.div_euclid(cell);
    (first as i64)..=(last as i64)
}

fn clamp_unit(r: std::ops::RangeInclusive<i64>, level: u32) -> std::ops::RangeInclusive<i64> {
    let side = 1i64 << level;
    (*r.start()).max(0)..=(*r.end()).min(side - 1)
}

/// `F_n(g, B)`: the smallest level-`n` complex in `K₀` containing
/// `g(int_n(B)) ∩ K₀`, where `n` is the level of `B`.
///
/// For an invertible `g` the image of each piece is the closure of its
/// interior, so this is the set of cubes meeting some piece in positive
/// volume. A singular `g` flattens the pieces and every touching cube is kept.
pub fn f_cover(g: &IntAffine, b: &DyadicComplex) -> DyadicComplex {
    let n = b.level();
    let interior = b.interior_subcomplex();
    let frame = Frame::new(g, n + 2);
    let cell = frame.scale() >> n;
    let mut hits = BTreeSet::new();
    for piece in interior.iter() {
        let par = frame.image(g, &piece);
        let bb = par.bounds();
        let rx = clamp_unit(cell_range(bb.lo[0], bb.hi[0], cell), n);
        let ry = clamp_unit(cell_range(bb.lo[1], bb.hi[1], cell), n);
        let rz = clamp_unit(cell_range(bb.lo[2], bb.hi[2], cell), n);
        for x in rx {
            for y in ry.clone() {
                for z in rz.clone() {
                    let k = [x, y, z];
                    if hits.contains(&k) {
                        continue;
                    }
                    let target = CubeId::extended(n, k);
                    let contact = par.classify(&frame.cube_box(&target));
                    if contact == BoxContact::Overlapping || (par.singular && contact.meets()) {
                        hits.insert(k);
                    }
                }
            }
        }
    }
    DyadicComplex::from_sorted(n, hits.into_iter().collect()).expect("sorted")
}

/// Whether some candidate axis separates the closed sets by a gap strictly
/// larger than `margin` (in frame units via `scale`).
fn gap_exceeds(par: &Parallelepiped, b: &AxisBox, margin: &Q, scale: i128) -> bool {
    let mn = BigInt::from(*margin.numer());
    let md = BigInt::from(*margin.denom());
    let scale = BigInt::from(scale);
    for u in candidate_axes(&par.edges) {
        let (plo, phi) = par.project(&u);
        let (blo, bhi) = b.project(&u);
        let gap = if phi < blo {
            blo - phi
        } else if bhi < plo {
            plo - bhi
        } else {
            continue;
        };
        // gap / (scale·|u|) > margin  ⇔  gap²·md² > mn²·|u|²·scale²
        let gap = BigInt::from(gap);
        let norm2 = BigInt::from(dot(&u, &u));
        if &gap * &gap * &md * &md > &mn * &mn * norm2 * &scale * &scale {
            return true;
        }
    }
    false
}

/// Whether `g(source)` and `target` are certainly more than `margin` apart.
/// Sound but conservative: only the standard axes are tried.
pub fn separated_by_margin(g: &IntAffine, source: &CubeId, target: &CubeId, margin: &Q) -> bool {
    let frame = Frame::new(g, source.level().max(target.level()));
    let par = frame.image(g, source);
    gap_exceeds(&par, &frame.cube_box(target), margin, frame.scale())
}

/// Level-`n` cubes (anywhere in space) that may lie within Euclidean distance
/// `margin` of `g(B)`. A superset of the exact set: a cube is dropped only
/// when an axis certifies a larger gap.
pub fn outer_cover_unclipped(g: &IntAffine, b: &DyadicComplex, margin: &Q) -> DyadicComplex {
    assert!(*margin >= Q::zero(), "margin must be non-negative");
    let n = b.level();
    let frame = Frame::new(g, n);
    let scale = frame.scale();
    let cell = scale >> n;
    // margin in frame units, rounded up
    let pad = (*margin * Q::from_integer(scale)).ceil().to_integer();
    let mut hits = BTreeSet::new();
    for c in b.iter() {
        let par = frame.image(g, &c);
        let bb = par.bounds();
        let r = [0, 1, 2].map(|i| cell_range(bb.lo[i] - pad, bb.hi[i] + pad, cell));
        for x in r[0].clone() {
            for y in r[1].clone() {
                for z in r[2].clone() {
                    let k = [x, y, z];
                    if hits.contains(&k) {
                        continue;
                    }
                    let target = CubeId::extended(n, k);
                    if !gap_exceeds(&par, &frame.cube_box(&target), margin, scale) {
                        hits.insert(k);
                    }
                }
            }
        }
    }
    DyadicComplex::from_sorted(n, hits.into_iter().collect()).expect("sorted")
}

/// [`outer_cover_unclipped`] intersected with `K₀`.
pub fn outer_cover(g: &IntAffine, b: &DyadicComplex, margin: &Q) -> DyadicComplex {
    outer_cover_unclipped(g, b, margin).clip_to_unit_cube()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motions::matrix::{q, qi, RigidMotion};

    #[test]
    fn identity_cover_of_single_cube() {
        let b = DyadicComplex::from_coords(2, [[1, 2, 3]]).unwrap();
        assert_eq!(f_cover(&IntAffine::identity(), &b), b);
        let e = DyadicComplex::empty(2);
        assert!(f_cover(&IntAffine::identity(), &e).is_empty());
    }

    #[test]
    fn shifted_interior_lands_in_one_cube() {
        let g = RigidMotion::translation([q(3, 8), qi(0), qi(0)]).to_int_affine();
        let b = DyadicComplex::from_coords(1, [[0, 0, 0]]).unwrap();
        let cover = f_cover(&g, &b);
        assert_eq!(cover.coords(), &[[1, 0, 0]]);
    }

    #[test]
    fn outer_cover_contact_set() {
        let id = IntAffine::identity();
        let b = DyadicComplex::from_coords(2, [[1, 1, 1]]).unwrap();
        let zero = outer_cover(&id, &b, &qi(0));
        assert_eq!(zero.len(), 27);
        let quarter = outer_cover(&id, &b, &q(1, 16));
        assert_eq!(quarter.len(), 27);
        let corner = DyadicComplex::from_coords(2, [[0, 0, 0]]).unwrap();
        assert_eq!(outer_cover(&id, &corner, &qi(0)).len(), 8);
        assert_eq!(outer_cover_unclipped(&id, &corner, &qi(0)).len(), 27);
        assert!(outer_cover(&id, &DyadicComplex::empty(2), &qi(0)).is_empty());
    }

    #[test]
    fn margin_reaches_second_ring() {
        let id = IntAffine::identity();
        let b = DyadicComplex::from_coords(3, [[3, 3, 3]]).unwrap();
        // a full cell of margin pulls in cubes two steps away along an axis
        let wide = outer_cover(&id, &b, &q(1, 8));
        assert!(wide.contains_coords(&[5, 3, 3]));
        let narrow = outer_cover(&id, &b, &q(1, 32));
        assert!(!narrow.contains_coords(&[5, 3, 3]));
    }

    #[test]
    fn margin_separation() {
        let id = IntAffine::identity();
        let a = CubeId::extended(2, [0, 0, 0]);
        let far = CubeId::extended(2, [2, 0, 0]);
        assert!(separated_by_margin(&id, &a, &far, &q(1, 8)));
        assert!(!separated_by_margin(&id, &a, &far, &q(1, 4)));
    }
}
