//! The two-copy construction `X = C ∪ D ∪ α(C)`, `Y = C ∪ D ∪ α(D)`, exact
//! cover and equidecomposition verifiers over dyadic pieces, and the
//! probability that a generated complex contains a subcongruent cube.

mod decomp;
mod probability;
mod xy;

pub use decomp::{verify_cover, verify_equidecomposition, Clause, EquidecompReport, PieceDecomposition};
pub use probability::{
    cube_symmetries, subcongruence_probability, ExactProbability, MonteCarloEstimate, ProbabilityExperiment, ProbabilityMode,
    ProbabilityQuery, ProbabilityResult, Z_99,
};
pub use xy::{build_xy, XYPair};

use crate::dyadic::DyadicError;
use crate::motions::MotionError;
use crate::search::SearchError;
use crate::sponge::SpongeError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquidecompError {
    #[error("step {step} has no pair of non-touching cubes")]
    NoDisjointPair { step: usize },
    #[error("measures differ: {0}")]
    MeasureMismatch(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("outcome space too large: {0}")]
    Budget(String),
    #[error("malformed decomposition: {0}")]
    Parse(String),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Sponge(#[from] SpongeError),
}
