use super::{verify_cover, EquidecompError};
use crate::dyadic::{CubeId, DyadicComplex};
use crate::motions::DyadicMotion;

/// Two non-touching cubes `A`, `B` of step `j`, their parts `C`, `D` in the
/// deepest complex, and the sets built from them with `α = +(1,0,0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XYPair {
    pub step: usize,
    pub a: CubeId,
    pub b: CubeId,
    pub c: DyadicComplex,
    pub d: DyadicComplex,
    pub alpha: DyadicMotion,
    /// `C ∪ D ∪ α(C)`; the last part lies in `[1,2]×[0,1]²`.
    pub x: DyadicComplex,
    /// `C ∪ D ∪ α(D)`.
    pub y: DyadicComplex,
    /// The step is the deepest one, so `C` and `D` are whole cubes and `X`,
    /// `Y` are congruent.
    pub degenerate: bool,
}

/// Picks the first pair of non-touching cubes of `trace[step]` in canonical
/// order and assembles `X` and `Y` from the deepest complex.
pub fn build_xy(trace: &[DyadicComplex], step: usize) -> Result<XYPair, EquidecompError> {
    let m = trace
        .get(step)
        .ok_or_else(|| EquidecompError::Precondition(format!("trace has no step {step}")))?;
    let deepest = trace.last().expect("non-empty");
    let cubes: Vec<CubeId> = m.iter().collect();
    let (a, b) = cubes
        .iter()
        .enumerate()
        .find_map(|(i, a)| cubes[i + 1..].iter().find(|b| !a.closed_intersects(b)).map(|b| (*a, *b)))
        .ok_or(EquidecompError::NoDisjointPair { step })?;
    let c = deepest.restrict_to_cube(&a);
    let d = deepest.restrict_to_cube(&b);
    let alpha = DyadicMotion::unit_x();
    let x = c.union(&d).union(&alpha.apply_to_complex(&c)?);
    let y = c.union(&d).union(&alpha.apply_to_complex(&d)?);
    if x.measure() != y.measure() {
        return Err(EquidecompError::MeasureMismatch(format!("μ(X) = {}, μ(Y) = {}", x.measure(), y.measure())));
    }
    Ok(XYPair {
        step,
        a,
        b,
        c,
        d,
        alpha,
        x,
        y,
        degenerate: step + 1 == trace.len(),
    })
}

impl XYPair {
    /// `{Id, α, α⁻¹}`.
    pub fn cover_motions(&self) -> Vec<DyadicMotion> {
        vec![DyadicMotion::identity(), self.alpha.clone(), self.alpha.inverse()]
    }

    /// Each of `X`, `Y` is covered by copies of the other under [`Self::cover_motions`].
    pub fn mutual_cover(&self) -> Result<bool, EquidecompError> {
        let s = self.cover_motions();
        Ok(verify_cover(&self.x, &self.y, &s)? && verify_cover(&self.y, &self.x, &s)?)
    }

    /// `C`, `D` and `α(C)` are pairwise disjoint as cube sets.
    pub fn parts_disjoint(&self) -> bool {
        let ac = self.alpha.apply_to_complex(&self.c).expect("integral translation");
        !self.c.overlaps(&self.d) && !ac.overlaps(&self.c.union(&self.d))
    }
}
