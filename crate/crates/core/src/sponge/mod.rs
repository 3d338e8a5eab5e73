//! Parameter schedules and seeded generation of the nested random complexes.

mod config;
mod generate;
mod schedule;

pub use generate::{
    decode_choices, encode_choices, generate, grow, parent_rng, replay, sample_subset, step_sizes, GenerationTrace, DEFAULT_BUDGET,
};
pub use schedule::{Check, Consistency, Mode, Schedule, ValidationReport};

use crate::dyadic::DyadicError;
use crate::entropy::EntropyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpongeError {
    #[error("malformed schedule: {0}")]
    Shape(String),
    #[error("schedule fails validation: {0:?}")]
    Invalid(Box<ValidationReport>),
    #[error("memory budget exceeded: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}
