//! Iterated function systems, classical and quantum.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod invariant;
pub mod io;
pub mod qstate;
pub mod quantum;
pub mod spin;
pub mod torus;

pub use error::{Error, Result};
