//! Exact dyadic complexes and the random Menger-type sponge model built on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`]: cubes, complexes, exact measure and the `DYCX` file format.
//! * [`motions`]: exact rigid motions, grid approximants, the separating-axis
//!   predicate, interior-based covers and exact clipped volumes.
//! * [`entropy`]: certified interval and log-domain arithmetic, binomial and
//!   binary-entropy bounds and the logrange accounting of the generator.
//! * [`sponge`]: parameter schedules and seeded generation of nested complexes.
//! * [`search`]: subcongruent-cube detection, safe-cube certificates and
//!   expansion counterexamples.
//! * [`equidecomp`]: the two-copy construction, cover and equidecomposition
//!   verifiers, and subcongruence probability estimation.
//! * [`persist`]: trace directories and experiment manifests.

pub mod dyadic;
pub mod entropy;
pub mod equidecomp;
pub mod motions;
pub mod persist;
pub mod search;
pub mod sponge;

pub use dyadic::{CubeId, DyadicComplex, DyadicError, DyadicRational};
pub use motions::{DyadicMotion, GridMatrix, RigidMotion};
pub use sponge::{GenerationTrace, Schedule};
