//! KDM subset: code, action and UI elements with traceable source references.

mod inject;
mod model;
mod validate;

pub use inject::{inject, Injection, FORMS_CONSTANTS, ZERO_ARG_BUILTINS};
pub use model::*;
pub use validate::validate_code_model;
