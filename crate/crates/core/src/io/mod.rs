//! Spec-file ingestion and deterministic text/CSV rendering.

pub mod render;
pub mod spec;

pub use spec::{parse_spec, serialize_spec, SpecDocument, SpecError};
