//! Simulation and detection toolkit for local track irregularities on
//! simply-supported railway bridges.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`track`] builds a vertical irregularity profile (random roughness plus
//!    raised-cosine bumps).
//! 2. [`dynamics`] drives a modal beam model with the moving axle loads and
//!    produces per-sensor accelerations, then resamples them onto train-head
//!    position.
//! 3. [`wavelet`] runs a derivative-of-Gaussian CWT on each sensor series and
//!    sums absolute coefficients across scales (index-1).
//! 4. [`detect`] thresholds index-1 against baseline statistics, screens
//!    sensors and localizes defects from carriage-periodic peak chains
//!    (index-2).
//!
//! [`scenario`] wires the stages together for the command-line tool.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detect;
pub mod dynamics;
pub mod error;
pub mod scenario;
pub mod track;
pub mod wavelet;

pub use error::{Error, Result};

/// Standard gravity (m/s²).
pub const GRAVITY: f64 = 9.81;

/// Converts km/h to m/s.
pub fn kmh_to_ms(kmh: f64) -> f64 {
    kmh / 3.6
}
