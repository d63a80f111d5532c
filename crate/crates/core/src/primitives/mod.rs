//! Platform-independent primitives IR.
mod model;
mod transform;

pub use model::*;
pub use transform::{kdm_to_primitives, Transformation};
