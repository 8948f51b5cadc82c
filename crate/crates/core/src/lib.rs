//! Superadiabatic holonomic gates in a cavity-QED model.
//!
//! The crate synthesizes Vitanov-style adiabatic schedules for a tripod atom
//! (and for the Raman-coupled two-atom cavity system), reshapes them with the
//! superadiabatic (SATD) or modified superadiabatic (MSA) dressing, and checks
//! the resulting holonomic gates with closed-system and Lindblad dynamics.
//!
//! Layout:
//!
//! - [`pulse`]: schedules, dressing, corrected pulses, the `τ_min` solver and pulse tables.
//! - [`model`]: tripod and Raman-cavity Hamiltonians, frame operators, collapse operators.
//! - [`dynamics`]: state containers and fixed-step RK4 for Schrödinger and Lindblad evolution.
//! - [`gates`]: two-leg protocols, gate reconstruction, fidelities and sweeps.
//! - [`config`]: JSON run configuration used by the `satd` binary.
//!
//! Units are SI throughout: seconds and rad/s.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod model;
pub mod pulse;

pub use error::{Error, Result};

/// Complex scalar used for all amplitudes and operators.
pub type C64 = num_complex::Complex64;

/// 2π × 1 MHz in rad/s.
pub const TWO_PI_MHZ: f64 = 2.0 * std::f64::consts::PI * 1.0e6;
