//! Migration of RAD form triggers and PL/SQL program units to MVC Java code.

pub mod diagnostics;
pub mod frontend;
pub mod naming;
pub mod kdm;
pub mod builtins;
pub mod primitives;
pub mod platform;
pub mod oo;
pub mod codegen;
pub mod metrics;
pub mod flowgraph;
pub mod pipeline;
