//! Human-body reflection model for multi-channel RSS links and the energy
//! detector built on it: ripple model, channel energy, Neyman-Pearson
//! thresholds, Monte Carlo validation, trace processing and coverage maps.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod energy;
pub mod detector;
pub mod pipeline;
pub mod simulate;
pub mod spatial;
pub mod specfun;

pub use error::{Error, Result};
