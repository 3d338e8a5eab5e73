use std::fmt;

use super::geom::{complex_meets_box, image_box, IntBox};
use super::SearchError;
use crate::dyadic::{CubeId, DyadicComplex};
use crate::motions::{format_mat4, parse_mat4, DyadicMotion};

/// A cube `K` with mass in the deepest complex and a step `j` such that
/// `M_j ∩ δ(K) = ∅` for every `δ ∈ T`. Since the complexes are nested,
/// the same emptiness then holds at every later step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafeCubeCertificate {
    pub cube: CubeId,
    pub step: usize,
    pub motions: Vec<DyadicMotion>,
    /// Number of deepest-level cubes inside `K`.
    pub deepest_mass: usize,
    /// One verdict per motion: `M_step ∩ δ(K) = ∅`.
    pub empty: Vec<bool>,
}

fn check_motions(t: &[DyadicMotion]) -> Result<(), SearchError> {
    if t.iter().any(DyadicMotion::is_identity) {
        return Err(SearchError::Precondition("the motion set contains the identity".into()));
    }
    Ok(())
}

/// Number of cubes of `m` inside `k`, counted at the finer of the two levels.
fn mass_in(m: &DyadicComplex, k: &CubeId) -> usize {
    m.restrict_to_cube(k).len()
}

/// Sub-cubes of `k` at levels `k.level()..=max_level`, coarsest first and in
/// canonical order within a level.
fn subcubes(k: CubeId, max_level: u32) -> impl Iterator<Item = CubeId> {
    (k.level()..=max_level.max(k.level())).flat_map(move |l| k.descendants(l).collect::<Vec<_>>())
}

fn self_disjoint(d: &DyadicMotion, k: &CubeId) -> bool {
    !IntBox::of_cube(k, k.level()).meets(&image_box(d, k))
}

/// Runs the inductive construction over `trace` (nested complexes, coarsest
/// first): start from the first cube of `a` carrying deepest-level mass and,
/// for each motion in turn, shrink it to the first sub-cube (coarsest level
/// first) that keeps mass, is disjoint from its image, and whose image misses
/// some complex `M_k` with `k ≥ j`; the least such `k` becomes the new `j`.
///
/// Returns `Ok(None)` when the trace is too shallow for some motion.
pub fn find_safe_cube(
    trace: &[DyadicComplex],
    a: &DyadicComplex,
    t: &[DyadicMotion],
) -> Result<Option<SafeCubeCertificate>, SearchError> {
    check_motions(t)?;
    let deepest = trace
        .last()
        .ok_or_else(|| SearchError::Precondition("empty trace".into()))?;
    let max_level = deepest.level();
    let Some(mut k) = a.iter().find(|c| mass_in(deepest, c) > 0) else {
        return Err(SearchError::Precondition("the region does not meet the deepest complex".into()));
    };
    let mut j = 0usize;
    for d in t {
        // The sub-cube K'' is searched directly: a cube that is disjoint from
        // its own image and whose image misses M_k serves as both K' and K''.
        let mut found = None;
        'search: for c in subcubes(k, max_level) {
            if mass_in(deepest, &c) == 0 || !self_disjoint(d, &c) {
                continue;
            }
            let img = image_box(d, &c);
            for (step, m) in trace.iter().enumerate().skip(j) {
                if !complex_meets_box(m, &img) {
                    found = Some((c, step));
                    break 'search;
                }
            }
        }
        let Some((next, step)) = found else {
            return Ok(None);
        };
        k = next;
        j = step;
    }
    let m_j = &trace[j];
    let empty = t.iter().map(|d| !complex_meets_box(m_j, &image_box(d, &k))).collect();
    Ok(Some(SafeCubeCertificate {
        cube: k,
        step: j,
        motions: t.to_vec(),
        deepest_mass: mass_in(deepest, &k),
        empty,
    }))
}

impl SafeCubeCertificate {
    /// Re-checks every recorded quantity against the trace.
    pub fn verify(&self, trace: &[DyadicComplex]) -> bool {
        let Some(deepest) = trace.last() else { return false };
        if self.step >= trace.len() || check_motions(&self.motions).is_err() {
            return false;
        }
        let mass = mass_in(deepest, &self.cube);
        let empty: Vec<bool> = self
            .motions
            .iter()
            .map(|d| !complex_meets_box(&trace[self.step], &image_box(d, &self.cube)))
            .collect();
        mass > 0 && mass == self.deepest_mass && empty == self.empty && empty.iter().all(|&e| e)
    }

    pub fn to_record(&self) -> String {
        self.to_string()
    }

    pub fn from_record(text: &str) -> Result<Self, SearchError> {
        let mut r = Reader::new(text);
        r.expect_line("SAFECUBE 1")?;
        let cube = parse_cube(r.field("cube")?)?;
        let step = r.number("step")?;
        let deepest_mass = r.number("deepest_mass")?;
        let count: usize = r.number("motions")?;
        let mut motions = Vec::with_capacity(count);
        let mut empty = Vec::with_capacity(count);
        for _ in 0..count {
            let v = r.field("motion")?;
            let (flag, mat) = v
                .split_once(' ')
                .ok_or_else(|| SearchError::Parse(format!("bad motion line {v:?}")))?;
            empty.push(parse_flag(flag)?);
            motions.push(parse_motion(mat)?);
        }
        r.finish()?;
        Ok(Self {
            cube,
            step,
            motions,
            deepest_mass,
            empty,
        })
    }
}

impl fmt::Display for SafeCubeCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SAFECUBE 1")?;
        writeln!(f, "cube {}", format_cube(&self.cube))?;
        writeln!(f, "step {}", self.step)?;
        writeln!(f, "deepest_mass {}", self.deepest_mass)?;
        writeln!(f, "motions {}", self.motions.len())?;
        for (d, e) in self.motions.iter().zip(&self.empty) {
            writeln!(f, "motion {} {}", if *e { "empty" } else { "meets" }, format_mat4(&d.to_mat4()))?;
        }
        Ok(())
    }
}

pub(super) fn format_cube(c: &CubeId) -> String {
    let [x, y, z] = c.coords();
    format!("{} {x} {y} {z}", c.level())
}

pub(super) fn parse_cube(s: &str) -> Result<CubeId, SearchError> {
    let v: Vec<i64> = s
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| SearchError::Parse(format!("bad cube {s:?}")))?;
    match v[..] {
        [l, x, y, z] if (0..=crate::dyadic::MAX_LEVEL as i64).contains(&l) => Ok(CubeId::extended(l as u32, [x, y, z])),
        _ => Err(SearchError::Parse(format!("bad cube {s:?}"))),
    }
}

pub(super) fn parse_motion(s: &str) -> Result<DyadicMotion, SearchError> {
    let m = parse_mat4(s)?;
    DyadicMotion::from_mat4(&m).ok_or_else(|| SearchError::Parse(format!("not a dyadic motion: {s:?}")))
}

fn parse_flag(s: &str) -> Result<bool, SearchError> {
    match s {
        "empty" => Ok(true),
        "meets" => Ok(false),
        _ => Err(SearchError::Parse(format!("bad flag {s:?}"))),
    }
}

/// Line reader for `key value` records.
pub(super) struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    pub(super) fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str), SearchError> {
        self.lines
            .next()
            .ok_or_else(|| SearchError::Parse("record ends early".into()))
    }

    pub(super) fn expect_line(&mut self, want: &str) -> Result<(), SearchError> {
        let (n, l) = self.next()?;
        if l.trim_end() != want {
            return Err(SearchError::Parse(format!("line {}: expected {want:?}", n + 1)));
        }
        Ok(())
    }

    pub(super) fn field(&mut self, key: &str) -> Result<&'a str, SearchError> {
        let (n, l) = self.next()?;
        l.strip_prefix(key)
            .and_then(|v| v.strip_prefix(' '))
            .ok_or_else(|| SearchError::Parse(format!("line {}: expected key {key:?}", n + 1)))
    }

    pub(super) fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, SearchError> {
        let v = self.field(key)?;
        v.trim()
            .parse()
            .map_err(|_| SearchError::Parse(format!("bad value for {key}: {v:?}")))
    }

    pub(super) fn finish(mut self) -> Result<(), SearchError> {
        match self.lines.find(|(_, l)| !l.trim().is_empty()) {
            Some((n, _)) => Err(SearchError::Parse(format!("line {}: trailing data", n + 1))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_motion_set() {
        let m = DyadicComplex::from_coords(1, [[0, 1, 0], [1, 1, 1]]).unwrap();
        let trace = vec![DyadicComplex::full(1), m.clone()];
        let cert = find_safe_cube(&trace, &DyadicComplex::full(0), &[]).unwrap().unwrap();
        assert_eq!(cert.cube, CubeId::unit());
        assert_eq!(cert.step, 0);
        assert!(cert.verify(&trace));
    }

    #[test]
    fn far_cubes_and_unit_translation() {
        let m = DyadicComplex::from_coords(2, [[0, 0, 0], [3, 3, 3]]).unwrap();
        let trace = vec![DyadicComplex::full(0), m.clone()];
        let cert = find_safe_cube(&trace, &m, &[DyadicMotion::unit_x()]).unwrap().unwrap();
        assert_eq!(cert.cube, CubeId::extended(2, [0, 0, 0]));
        assert_eq!(cert.empty, vec![true]);
        assert!(cert.verify(&trace));
        let back = SafeCubeCertificate::from_record(&cert.to_record()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn shallow_trace_is_not_found() {
        // a small shift maps a neighbour of every cube back into the full complex
        let trace = vec![DyadicComplex::full(1)];
        let d = DyadicMotion::translation_at(3, [1, 0, 0]);
        assert_eq!(find_safe_cube(&trace, &DyadicComplex::full(1), &[d]).unwrap(), None);
    }

    #[test]
    fn identity_is_rejected() {
        let trace = vec![DyadicComplex::full(1)];
        let r = find_safe_cube(&trace, &DyadicComplex::full(0), &[DyadicMotion::identity()]);
        assert!(matches!(r, Err(SearchError::Precondition(_))));
    }

    #[test]
    fn tampered_record_fails() {
        let m = DyadicComplex::from_coords(2, [[0, 0, 0], [3, 3, 3]]).unwrap();
        let trace = vec![m.clone()];
        let mut cert = find_safe_cube(&trace, &m, &[DyadicMotion::unit_x()]).unwrap().unwrap();
        cert.deepest_mass = 2;
        assert!(!cert.verify(&trace));
        assert!(SafeCubeCertificate::from_record("SAFECUBE 1\ncube 0 0 0\n").is_err());
    }
}
