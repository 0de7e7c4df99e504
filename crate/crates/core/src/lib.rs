//! Graph-world simulation of navigation among moving humans: scenarios,
//! an episode engine, expert planners, metrics, offline datasets and an
//! experiment harness.

// NaN must fail parameter checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod error;
pub mod geom;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod sim;
pub mod world;

pub use error::{Error, Result};
