//! Searching complexes for subcongruent cubes, and the certificates built
//! around them: approximate-motion verdicts, safe cubes and expansion
//! counterexamples.

mod certify;
mod detect;
pub mod geom;
mod expansion;
mod safe;

pub use certify::{certify_approx_subcongruence, ApproxVerdict};
pub use detect::{candidate_cubes, detect_subcongruent_exact, Disjointness, SubcongruenceWitness, WitnessChecks};
pub use expansion::{expansion_counterexample, expansion_estimate, expansion_ratio, ExpansionCounterexample, ExpansionEstimate};
pub use safe::{find_safe_cube, SafeCubeCertificate};

use crate::dyadic::DyadicError;
use crate::motions::MotionError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("level mismatch: {0}")]
    Level(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("malformed certificate: {0}")]
    Parse(String),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}
