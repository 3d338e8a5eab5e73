use num_traits::Zero;

use super::SearchError;
use crate::dyadic::{CubeId, DyadicComplex};
use crate::motions::{displacement_bound, f_cover, outer_cover_unclipped, separated_by_margin, GridMatrix, IntAffine, Q};

/// Outcome of testing every isometry near a grid candidate at once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ApproxVerdict {
    /// Every isometry `g` with `d₁(g, d) < 2^-(n+5)` witnesses subcongruence of `A`.
    CertifiedYes,
    /// No such isometry maps `A ∩ M` into `M` up to a null set.
    CertifiedNo,
    Inconclusive,
}

/// Decides, when it can, whether the isometries close to the grid matrix
/// `d` make the `s`-cube `a` subcongruent in `m`.
pub fn certify_approx_subcongruence(
    m: &DyadicComplex,
    s: u32,
    d: &GridMatrix,
    a: &CubeId,
) -> Result<ApproxVerdict, SearchError> {
    let n = m.level();
    if d.n() != n {
        return Err(SearchError::Level(format!("grid level {} differs from complex level {n}", d.n())));
    }
    if a.level() != s || s > n {
        return Err(SearchError::Level(format!("cube {a} is not an S-cube with S = {s} ≤ {n}")));
    }
    let b = m.restrict_to_cube(a);
    if b.is_empty() {
        return Err(SearchError::Precondition(format!("{a} does not meet the complex")));
    }
    let g = d.to_int_affine();
    let margin = displacement_bound(n);

    if !f_cover(&g, &b).is_subset_of(m) || leaves_unit_cube(&g, &b, &margin) {
        return Ok(ApproxVerdict::CertifiedNo);
    }
    let cover = outer_cover_unclipped(&g, &b, &margin);
    if cover.is_subset_of(m) && separated_by_margin(&g, a, a, &margin) {
        return Ok(ApproxVerdict::CertifiedYes);
    }
    Ok(ApproxVerdict::Inconclusive)
}

/// Whether `g` sends a corner of some cube of `b` farther than `margin`
/// outside `K₀` along an axis. Nearby isometries then move an open piece
/// of the cube off `K₀`, and so off `M`.
fn leaves_unit_cube(g: &IntAffine, b: &DyadicComplex, margin: &Q) -> bool {
    let level = b.level();
    let scale = g.den << level;
    // margin in units of 1/scale, compared exactly: v/scale < -margin ⇔ v·md < -mn·scale
    let (mn, md) = (*margin.numer(), *margin.denom());
    debug_assert!(!margin.is_zero());
    b.coords().iter().any(|c| {
        (0..8).any(|corner| {
            let x = [0, 1, 2].map(|i| (c[i] + ((corner >> i) & 1)) as i128);
            let y = g.apply_scaled(x, level);
            y.iter().any(|&v| v * md < -mn * scale || (v - scale) * md > mn * scale)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motions::{DyadicMotion, RigidMotion};
    use crate::motions::{q, qi};
    use crate::search::{detect_subcongruent_exact, Disjointness};

    fn grid(motion: &DyadicMotion, n: u32) -> GridMatrix {
        GridMatrix::round(&motion.to_mat4(), n).unwrap()
    }

    #[test]
    fn interior_translation_is_certified() {
        let m = DyadicComplex::full(3);
        let a = CubeId::extended(3, [2, 2, 2]);
        let d = grid(&DyadicMotion::translation_at(2, [1, 0, 0]), 3);
        assert_eq!(certify_approx_subcongruence(&m, 3, &d, &a).unwrap(), ApproxVerdict::CertifiedYes);
    }

    #[test]
    fn coarse_detector_witness_is_certified() {
        // a lone cube and a block whose centre is a coarse translate of it
        let mut cells = vec![[1, 1, 1]];
        for x in 4..7 {
            for y in 0..3 {
                for z in 0..3 {
                    cells.push([x, y, z]);
                }
            }
        }
        let m = DyadicComplex::from_coords(3, cells).unwrap();
        let w = detect_subcongruent_exact(&m, 3, 1, Disjointness::Closed).unwrap().unwrap();
        assert_eq!(w.motion, DyadicMotion::translation_at(1, [1, 0, 0]));
        let d = grid(&w.motion, 3);
        assert_eq!(certify_approx_subcongruence(&m, 3, &d, &w.a).unwrap(), ApproxVerdict::CertifiedYes);
    }

    #[test]
    fn missing_target_cube_is_certified_no() {
        let m = DyadicComplex::from_coords(2, [[0, 0, 0], [2, 0, 0]]).unwrap();
        let a = CubeId::extended(2, [0, 0, 0]);
        let d = grid(&DyadicMotion::translation_at(2, [1, 0, 0]), 2);
        assert_eq!(certify_approx_subcongruence(&m, 2, &d, &a).unwrap(), ApproxVerdict::CertifiedNo);
    }

    #[test]
    fn leaving_the_unit_cube_is_certified_no() {
        let m = DyadicComplex::full(2);
        let a = CubeId::extended(2, [3, 0, 0]);
        let d = grid(&DyadicMotion::translation_at(2, [1, 0, 0]), 2);
        assert_eq!(certify_approx_subcongruence(&m, 2, &d, &a).unwrap(), ApproxVerdict::CertifiedNo);
    }

    #[test]
    fn boundary_witness_is_inconclusive() {
        let m = DyadicComplex::full(2);
        let w = detect_subcongruent_exact(&m, 2, 2, Disjointness::Closed).unwrap().unwrap();
        let d = grid(&w.motion, 2);
        assert_eq!(certify_approx_subcongruence(&m, 2, &d, &w.a).unwrap(), ApproxVerdict::Inconclusive);
    }

    #[test]
    fn rotated_candidate() {
        // a quarter turn about the z axis through the centre, slightly perturbed
        let r = RigidMotion::from_quaternion([1, 0, 0, 1], [qi(1), qi(0), qi(0)]).unwrap();
        let mut mat = r.to_mat4();
        mat[0][3] += q(1, 1 << 12);
        let d = GridMatrix::round(&mat, 3).unwrap();
        let m = DyadicComplex::full(3);
        let a = CubeId::extended(3, [2, 5, 3]);
        let v = certify_approx_subcongruence(&m, 3, &d, &a).unwrap();
        assert_eq!(v, ApproxVerdict::CertifiedYes);
    }

    #[test]
    fn preconditions() {
        let m = DyadicComplex::from_coords(2, [[0, 0, 0]]).unwrap();
        let d = grid(&DyadicMotion::identity(), 2);
        assert!(certify_approx_subcongruence(&m, 2, &d, &CubeId::extended(2, [1, 1, 1])).is_err());
        assert!(certify_approx_subcongruence(&m, 3, &grid(&DyadicMotion::identity(), 3), &CubeId::extended(3, [0, 0, 0])).is_err());
    }
}
