use std::collections::BTreeSet;
use std::fmt;

use super::geom::{image_box, IntBox};
use super::safe::{format_cube, parse_cube, parse_motion, Reader};
use super::SearchError;
use crate::dyadic::{CubeId, DyadicComplex, DyadicRational};
use crate::motions::{format_mat4, DyadicMotion, SignedPerm};

/// How `A ∩ γ(A) = ∅` is read. There is deliberately no default.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Disjointness {
    /// Closed cubes: sharing a face, edge or corner counts as meeting.
    Closed,
    /// Only the interiors must be disjoint.
    InteriorsOnly,
}

impl Disjointness {
    pub fn disjoint(self, a: &IntBox, b: &IntBox) -> bool {
        match self {
            Disjointness::Closed => !a.meets(b),
            Disjointness::InteriorsOnly => !a.overlaps(b),
        }
    }
}

/// An `S`-cube `A` and a motion `γ ≠ Id` with `μ(A ∩ M) > 0`,
/// `A ∩ γ(A) = ∅` and `γ(A ∩ M) ⊆ M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubcongruenceWitness {
    pub a: CubeId,
    pub motion: DyadicMotion,
    pub disjointness: Disjointness,
}

/// Independent re-verification verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessChecks {
    pub positive_mass: bool,
    pub non_identity: bool,
    pub disjoint: bool,
    pub contained: bool,
}

impl WitnessChecks {
    pub fn all(&self) -> bool {
        self.positive_mass && self.non_identity && self.disjoint && self.contained
    }
}

impl SubcongruenceWitness {
    /// Re-checks all conditions from scratch with exact set operations.
    pub fn verify(&self, m: &DyadicComplex) -> WitnessChecks {
        let part = m.restrict_to_cube(&self.a);
        let positive_mass = part.measure() > DyadicRational::zero();
        let non_identity = !self.motion.is_identity();
        let a_box = IntBox::of_cube(&self.a, self.a.level());
        let disjoint = self.disjointness.disjoint(&a_box, &image_box(&self.motion, &self.a));
        let contained = match self.motion.apply_to_complex(&part) {
            Ok(img) => img.is_subset_of(m),
            Err(_) => {
                // translation finer than M: compare at the finer level
                let lvl = self.motion.resolution();
                match part.refine(lvl).and_then(|p| Ok((p, m.refine(lvl)?))) {
                    Ok((p, mm)) => self
                        .motion
                        .apply_to_complex(&p)
                        .map(|img| img.is_subset_of(&mm))
                        .unwrap_or(false),
                    Err(_) => false,
                }
            }
        };
        WitnessChecks {
            positive_mass,
            non_identity,
            disjoint,
            contained,
        }
    }
}

impl Disjointness {
    fn name(self) -> &'static str {
        match self {
            Disjointness::Closed => "closed",
            Disjointness::InteriorsOnly => "interiors",
        }
    }
}

impl std::str::FromStr for Disjointness {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" => Ok(Disjointness::Closed),
            "interiors" => Ok(Disjointness::InteriorsOnly),
            _ => Err(SearchError::Parse(format!("disjointness must be closed or interiors, not {s:?}"))),
        }
    }
}

/// ```text
/// WITNESS 1
/// cube <level> <x> <y> <z>
/// disjointness closed|interiors
/// motion <16 matrix entries>
/// ```
impl fmt::Display for SubcongruenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "WITNESS 1")?;
        writeln!(f, "cube {}", format_cube(&self.a))?;
        writeln!(f, "disjointness {}", self.disjointness.name())?;
        writeln!(f, "motion {}", format_mat4(&self.motion.to_mat4()))
    }
}

impl SubcongruenceWitness {
    pub fn to_record(&self) -> String {
        self.to_string()
    }

    pub fn from_record(text: &str) -> Result<Self, SearchError> {
        let mut r = Reader::new(text);
        r.expect_line("WITNESS 1")?;
        let a = parse_cube(r.field("cube")?)?;
        let disjointness = r.field("disjointness")?.trim().parse()?;
        let motion = parse_motion(r.field("motion")?)?;
        r.finish()?;
        Ok(Self { a, motion, disjointness })
    }
}

/// `perm(b)` for the linear part only.
fn permuted_box(perm: SignedPerm, b: &IntBox) -> IntBox {
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for i in 0..3 {
        let j = perm.source_axis(i);
        if perm.sign(i) > 0 {
            (lo[i], hi[i]) = (b.lo[j], b.hi[j]);
        } else {
            (lo[i], hi[i]) = (-b.hi[j], -b.lo[j]);
        }
    }
    IntBox { level: b.level, lo, hi }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// Level-`s` cubes meeting `m` in positive measure, in canonical order.
pub fn candidate_cubes(m: &DyadicComplex, s: u32) -> Vec<CubeId> {
    let set: BTreeSet<[i64; 3]> = m.iter().map(|c| c.ancestor(s).coords()).collect();
    set.into_iter().map(|k| CubeId::extended(s, k)).collect()
}

/// Exhaustive search for a subcongruent `s`-cube of `m` over the group of
/// cube symmetries composed with translations on the `2^-resolution` grid.
///
/// Candidates are visited in canonical order: `A` by rank, then symmetry
/// index, then translation ordered by `(t_z, t_y, t_x)`. The first witness
/// is returned. `None` refutes subcongruence over this subgroup only.
pub fn detect_subcongruent_exact(
    m: &DyadicComplex,
    s: u32,
    resolution: u32,
    disjointness: Disjointness,
) -> Result<Option<SubcongruenceWitness>, SearchError> {
    let l = m.level();
    if s > l || resolution > l {
        return Err(SearchError::Level(format!(
            "need S ({s}) and resolution ({resolution}) at most the complex level {l}"
        )));
    }
    if !m.is_within_unit_cube() {
        return Err(SearchError::Precondition("complex leaves the unit cube".into()));
    }
    let side = 1i64 << l;
    let step = 1i64 << (l - resolution);
    for a in candidate_cubes(m, s) {
        let part = m.restrict_to_cube(&a);
        let a_box = IntBox::of_cube(&a, l);
        for perm in SignedPerm::all() {
            let cells: Vec<[i64; 3]> = part.coords().iter().map(|&c| perm.image_cell(c)).collect();
            let mut bmin = [i64::MAX; 3];
            let mut bmax = [i64::MIN; 3];
            for c in &cells {
                for i in 0..3 {
                    bmin[i] = bmin[i].min(c[i]);
                    bmax[i] = bmax[i].max(c[i]);
                }
            }
            // translations keeping every image cell inside K₀
            let lo = [0, 1, 2].map(|i| ceil_div(-bmin[i], step));
            let hi = [0, 1, 2].map(|i| (side - 1 - bmax[i]).div_euclid(step));
            let a_perm = permuted_box(perm, &a_box);
            for tz in lo[2]..=hi[2] {
                for ty in lo[1]..=hi[1] {
                    for tx in lo[0]..=hi[0] {
                        let t = [tx * step, ty * step, tz * step];
                        if perm.is_identity() && t == [0, 0, 0] {
                            continue;
                        }
                        let moved = IntBox {
                            level: l,
                            lo: [0, 1, 2].map(|i| a_perm.lo[i] + t[i]),
                            hi: [0, 1, 2].map(|i| a_perm.hi[i] + t[i]),
                        };
                        if !disjointness.disjoint(&a_box, &moved) {
                            continue;
                        }
                        let inside = cells
                            .iter()
                            .all(|c| m.contains_coords(&[c[0] + t[0], c[1] + t[1], c[2] + t[2]]));
                        if inside {
                            let motion = DyadicMotion::new(perm, t.map(|v| DyadicRational::new(v, l)));
                            return Ok(Some(SubcongruenceWitness {
                                a,
                                motion,
                                disjointness,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}
