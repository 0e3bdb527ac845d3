//! Compile-once, query-many workbench for parameterized decision problems.
//!
//! Instances and parameter values are binary strings. A compilation scheme
//! splits a decision into an offline part that sees only the parameter and an
//! online part that sees the instance together with the offline result.

pub mod base;
pub mod cli;
pub mod error;
pub mod mixed;
pub mod problems;
pub mod reductions;
pub mod schemes;
pub mod verify;

pub use error::{Error, Result};
