//! Oscillation-driven reservoir computing with output feedback.
//!
//! Fixed oscillatory inputs drive a sparse random rate network whose linear
//! readout is trained online by recursive least squares and fed back as
//! input. See the README for the experiment harness and CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod harness;
pub mod oscillators;
pub mod reservoir;
pub mod seed;
pub mod sparse;
pub mod targets;
pub mod training;

pub use error::{OdrcError, Result};
