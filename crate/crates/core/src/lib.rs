//! Simulation and design of a one-step controlled-phase gate with one control
//! and several target qubits, carried by three-level atoms in a ring of
//! coupled cavities.
//!
//! Frequencies are dimensionless in units of the reference coupling `g`;
//! times are in units of `1/g`.

pub mod budget;
pub mod config;
pub mod couplings;
pub mod design;
pub mod dynamics;
pub mod error;
pub mod gate;
pub mod hilbert;
mod numeric;
pub mod runner;

pub use config::{resonance_pairing, validate_config, ResonanceReport, SystemConfig};
pub use couplings::{
    condition_ratios, mode_frequencies, raman_coefficients, reduced_couplings,
    second_order_coefficients, ConditionReport, EffectiveCouplings, Thresholds,
};
pub use error::{Error, Result};
