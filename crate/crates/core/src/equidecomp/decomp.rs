use std::fmt;

use super::EquidecompError;
use crate::dyadic::{DyadicComplex, MAX_LEVEL};
use crate::motions::{format_mat4, parse_mat4, DyadicMotion};

/// `source = ⊔ X_i` and `target = ⊔ γ_i(X_i)` with dyadic pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceDecomposition {
    pub source: DyadicComplex,
    pub target: DyadicComplex,
    pub pieces: Vec<(DyadicComplex, DyadicMotion)>,
}

/// The four conditions of a decomposition, in checking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    PiecesDisjoint,
    ImagesDisjoint,
    PiecesFormSource,
    ImagesFormTarget,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::PiecesDisjoint => "pieces-disjoint",
            Clause::ImagesDisjoint => "images-disjoint",
            Clause::PiecesFormSource => "pieces-form-source",
            Clause::ImagesFormTarget => "images-form-target",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquidecompReport {
    /// Level of the common refinement where every check is exact.
    pub level: u32,
    pub verdicts: [(Clause, bool); 4],
}

impl EquidecompReport {
    pub fn passes(&self) -> bool {
        self.verdicts.iter().all(|(_, ok)| *ok)
    }

    pub fn first_violation(&self) -> Option<Clause> {
        self.verdicts.iter().find(|(_, ok)| !ok).map(|(c, _)| *c)
    }
}

fn resolution(motions: impl Iterator<Item = u32>, base: u32) -> Result<u32, EquidecompError> {
    let level = motions.fold(base, u32::max);
    if level > MAX_LEVEL {
        return Err(EquidecompError::Precondition(format!("common level {level} is too deep")));
    }
    Ok(level)
}

/// Union of `parts`, and whether they are pairwise disjoint as cube sets
/// (they may share faces; only common cubes count as overlap).
fn disjoint_union(parts: &[DyadicComplex], level: u32) -> (DyadicComplex, bool) {
    let mut union = DyadicComplex::empty(level);
    let mut total = 0usize;
    for p in parts {
        total += p.len();
        union = union.union(p);
    }
    let disjoint = union.len() == total;
    (union, disjoint)
}

/// Checks the decomposition exactly at the common refinement of all pieces,
/// the source, the target and the motion translations.
///
/// Pieces are dyadic complexes, so a pass says nothing about decompositions
/// into arbitrary measurable pieces.
pub fn verify_equidecomposition(d: &PieceDecomposition) -> Result<EquidecompReport, EquidecompError> {
    let base = d
        .pieces
        .iter()
        .map(|(p, _)| p.level())
        .fold(d.source.level().max(d.target.level()), u32::max);
    let level = resolution(d.pieces.iter().map(|(_, g)| g.resolution()), base)?;
    let mut pieces = Vec::with_capacity(d.pieces.len());
    let mut images = Vec::with_capacity(d.pieces.len());
    for (p, g) in &d.pieces {
        let p = p.refine(level)?;
        images.push(g.apply_to_complex(&p)?);
        pieces.push(p);
    }
    let (pu, pd) = disjoint_union(&pieces, level);
    let (iu, id) = disjoint_union(&images, level);
    Ok(EquidecompReport {
        level,
        verdicts: [
            (Clause::PiecesDisjoint, pd),
            (Clause::ImagesDisjoint, id),
            (Clause::PiecesFormSource, pu == d.source.refine(level)?),
            (Clause::ImagesFormTarget, iu == d.target.refine(level)?),
        ],
    })
}

/// Whether `b ⊆ ⋃ γ(a)` over the given motions, exactly.
pub fn verify_cover(a: &DyadicComplex, b: &DyadicComplex, motions: &[DyadicMotion]) -> Result<bool, EquidecompError> {
    let level = resolution(motions.iter().map(DyadicMotion::resolution), a.level().max(b.level()))?;
    let a = a.refine(level)?;
    let mut union = DyadicComplex::empty(level);
    for g in motions {
        union = union.union(&g.apply_to_complex(&a)?);
    }
    Ok(b.refine(level)?.is_subset_of(&union))
}

fn write_cells(f: &mut fmt::Formatter<'_>, x: &DyadicComplex) -> fmt::Result {
    for [a, b, c] in x.coords() {
        writeln!(f, "{a} {b} {c}")?;
    }
    Ok(())
}

/// ```text
/// EQUIDECOMP 1
/// source <level> <count>
/// <count coordinate lines>
/// target <level> <count>
/// ...
/// pieces <k>
/// piece <level> <count> <16 matrix entries>
/// ...
/// ```
impl fmt::Display for PieceDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "EQUIDECOMP 1")?;
        writeln!(f, "source {} {}", self.source.level(), self.source.len())?;
        write_cells(f, &self.source)?;
        writeln!(f, "target {} {}", self.target.level(), self.target.len())?;
        write_cells(f, &self.target)?;
        writeln!(f, "pieces {}", self.pieces.len())?;
        for (p, g) in &self.pieces {
            writeln!(f, "piece {} {} {}", p.level(), p.len(), format_mat4(&g.to_mat4()))?;
            write_cells(f, p)?;
        }
        Ok(())
    }
}

struct Lines<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: Box::new(text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty())),
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str), EquidecompError> {
        self.inner
            .next()
            .ok_or_else(|| EquidecompError::Parse("record ends early".into()))
    }

    /// `key <level> <count> rest...`
    fn header(&mut self, key: &str) -> Result<(u32, usize, Vec<&'a str>), EquidecompError> {
        let (n, l) = self.next()?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(bad(n, &format!("expected {key}")));
        }
        let level = parts
            .next()
            .and_then(|v| v.parse().ok())
            .filter(|&v| v <= MAX_LEVEL)
            .ok_or_else(|| bad(n, "bad level"))?;
        let count = parts.next().and_then(|v| v.parse().ok()).ok_or_else(|| bad(n, "bad count"))?;
        Ok((level, count, parts.collect()))
    }

    fn cells(&mut self, level: u32, count: usize) -> Result<DyadicComplex, EquidecompError> {
        let mut cells = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let (n, l) = self.next()?;
            let v: Vec<i64> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad(n, "bad coordinate"))?;
            let [a, b, c] = v[..] else {
                return Err(bad(n, "expected three coordinates"));
            };
            cells.push([a, b, c]);
        }
        Ok(DyadicComplex::from_coords(level, cells)?)
    }
}

fn bad(n: usize, msg: &str) -> EquidecompError {
    EquidecompError::Parse(format!("line {}: {msg}", n + 1))
}

impl PieceDecomposition {
    pub fn to_record(&self) -> String {
        self.to_string()
    }

    pub fn from_record(text: &str) -> Result<Self, EquidecompError> {
        let mut r = Lines::new(text);
        let (n, head) = r.next()?;
        if head.trim_end() != "EQUIDECOMP 1" {
            return Err(bad(n, "bad header"));
        }
        let (l, c, _) = r.header("source")?;
        let source = r.cells(l, c)?;
        let (l, c, _) = r.header("target")?;
        let target = r.cells(l, c)?;
        let (n, l) = r.next()?;
        let k: usize = l
            .strip_prefix("pieces ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad(n, "expected pieces"))?;
        let mut pieces = Vec::with_capacity(k.min(1 << 16));
        for _ in 0..k {
            let (l, c, rest) = r.header("piece")?;
            let m = parse_mat4(&rest.join(" "))?;
            let g = DyadicMotion::from_mat4(&m)
                .ok_or_else(|| EquidecompError::Parse("piece motion is not a cube symmetry with dyadic translation".into()))?;
            pieces.push((r.cells(l, c)?, g));
        }
        if let Ok((n, _)) = r.next() {
            return Err(bad(n, "trailing data"));
        }
        Ok(Self { source, target, pieces })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::CubeId;

    /// The eight level-1 cubes of K₀ moved to the sites `2·(a,b,c)`.
    fn spread() -> PieceDecomposition {
        let mut pieces = Vec::new();
        let mut target = Vec::new();
        for c in DyadicComplex::full(1).iter() {
            let [a, b, z] = c.coords();
            pieces.push((c.into_complex(), DyadicMotion::translation_at(1, [a, b, z])));
            target.push([2 * a, 2 * b, 2 * z]);
        }
        PieceDecomposition {
            source: DyadicComplex::full(0),
            target: DyadicComplex::from_coords(1, target).unwrap(),
            pieces,
        }
    }

    #[test]
    fn spread_passes() {
        let d = spread();
        let r = verify_equidecomposition(&d).unwrap();
        assert!(r.passes(), "{r:?}");
        assert_eq!(r.level, 1);
        assert_eq!(PieceDecomposition::from_record(&d.to_record()).unwrap(), d);
    }

    #[test]
    fn overlapping_pieces_fail() {
        let mut d = spread();
        d.pieces[1].0 = d.pieces[0].0.clone();
        let r = verify_equidecomposition(&d).unwrap();
        assert_eq!(r.first_violation(), Some(Clause::PiecesDisjoint));
    }

    #[test]
    fn overlapping_images_fail() {
        let mut d = spread();
        // piece (0,0,1) sent onto the image of piece (0,0,0)
        d.pieces[1].1 = DyadicMotion::translation_at(1, [0, 0, -1]);
        let r = verify_equidecomposition(&d).unwrap();
        assert_eq!(r.first_violation(), Some(Clause::ImagesDisjoint));
    }

    #[test]
    fn cover_examples() {
        let a = CubeId::extended(1, [0, 0, 0]).into_complex();
        let eight: Vec<DyadicMotion> = DyadicComplex::full(1)
            .iter()
            .map(|c| DyadicMotion::translation_at(1, c.coords()))
            .collect();
        assert!(verify_cover(&a, &DyadicComplex::full(0), &eight).unwrap());
        assert!(!verify_cover(&a, &DyadicComplex::full(0), &eight[..7]).unwrap());
        assert!(!verify_cover(&a, &a, &[]).unwrap());
        assert!(verify_cover(&a, &DyadicComplex::empty(3), &[]).unwrap());
    }

    #[test]
    fn record_errors() {
        assert!(PieceDecomposition::from_record("EQUIDECOMP 2\n").is_err());
        assert!(PieceDecomposition::from_record("EQUIDECOMP 1\nsource 0 1\n0 0\n").is_err());
    }
}
