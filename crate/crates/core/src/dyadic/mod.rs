//! Dyadic cubes and complexes in the unit cube, with exact measure.

pub mod codec;
mod complex;
mod cube;
mod rational;

pub use complex::DyadicComplex;
pub use cube::{CubeBox, CubeId};
pub use rational::{DyadicRational, ParseDyadicError};

/// Deepest supported level. Coordinates are `i64` and the exact predicates
/// scale them by motion denominators in `i128`.
pub const MAX_LEVEL: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DyadicError {
    #[error("coordinates {coords:?} out of range at level {level}")]
    CoordOutOfRange { level: u32, coords: [i64; 3] },
    #[error("level {0} exceeds the supported maximum")]
    LevelTooLarge(u32),
    #[error("requested level {requested} is coarser than the complex level {current}")]
    LevelBelow { requested: u32, current: u32 },
    #[error("cube {0} is not a member of the complex")]
    NotMember(CubeId),
    #[error("expected {expected} child choices, got {got}")]
    ChoiceLength { expected: usize, got: usize },
    #[error("child rank {rank} for cube #{index} is not below {limit}")]
    ChoiceRange { index: usize, rank: u64, limit: u64 },
    #[error("cube list not strictly increasing at position {index}")]
    NotStrictlyIncreasing { index: usize },
    #[error("DYCX line {line}: {msg}")]
    Decode { line: usize, msg: String },
}
