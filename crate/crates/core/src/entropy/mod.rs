//! Certified bounds for the entropy and binomial estimates behind the
//! construction, including quantities far too large to write down.

mod binom;
pub mod bounds;
pub mod interval;
pub mod logq;
pub mod sweep;
pub mod terms;

pub use binom::binomial;
pub use bounds::*;
pub use interval::{Dy, Interval};
pub use logq::{LogQuantity, Sign};
pub use sweep::{sweep_binomial_lemmas, SweepReport};
pub use terms::{entropy_interval, ratio, Atom, BigCount, TermSum};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EntropyError {
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("not an integer: {0}")]
    NotIntegral(String),
    #[error("k exceeds n")]
    KExceedsN,
    #[error("value too large to expand: {0}")]
    TooLarge(String),
    #[error("sign could not be certified at working precision")]
    Uncertain,
}
