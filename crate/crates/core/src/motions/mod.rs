//! Exact rigid motions, grid approximants and the geometric predicates that
//! relate transformed cubes to the dyadic grid.

mod clip;
mod cover;
mod grid;
mod matrix;
mod sat;
mod signed;

pub use clip::{clipped_volume, image_volume_in_complex};
pub use cover::{f_cover, outer_cover, outer_cover_unclipped, separated_by_margin};
pub use grid::{displacement_bound, grid_values, GridMatrix};
pub use matrix::{
    d1, format_mat4, format_q, identity_mat4, parse_mat4, parse_q, q, qi, q_from_dyadic,
    split_mat4, IntAffine, Mat4, RigidMotion, Q,
};
pub use sat::{oriented_box_meets_cube, BoxContact};
pub use signed::{DyadicMotion, SignedPerm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MotionError {
    #[error("linear part is not exactly orthogonal")]
    NotOrthogonal,
    #[error("homogeneous matrix must have bottom row (0, 0, 0, 1)")]
    BadBottomRow,
    #[error("cannot parse motion: {0}")]
    Parse(String),
    #[error("translation is not integral at level {level}")]
    NonIntegralTranslation { level: u32 },
    #[error("entry {value} leaves the grid R({n})")]
    OffGrid { n: u32, value: String },
    #[error("matrix is not a cube symmetry with dyadic translation")]
    NotDyadic,
}
