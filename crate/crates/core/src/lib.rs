//! Typed objects with class inference, unions, cloning and indexation, and
//! five multiset constructors whose sizes and multiplicities are predicted in
//! closed form and checked by brute-force counting.
//!
//! - [`model`]: properties, specifications, signatures, objects, classes.
//! - [`algebra`]: collections, union, basic set, clone and index.
//! - [`constructors`]: UCM, CP, RCL, PS, D2.
//! - [`analytics`]: closed forms and prediction matrices.
//! - [`oracle`]: counting and checking constructor output against the closed forms.
//! - [`io`] and [`cli`]: spec files, rendering and the command line.

pub mod algebra;
pub mod analytics;
pub mod cli;
pub mod constructors;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod oracle;
pub mod predicates;

pub use algebra::{ObjectCollection, UnionOperand};
pub use model::{ClassDescriptor, ObjectInstance};
