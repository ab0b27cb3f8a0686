//! Wave-optics simulation of resonant beam communication links.
//!
//! The transmitter and receiver of a resonant beam link form a laser cavity
//! across free space. This crate propagates the intracavity field with the
//! angular-spectrum method, finds the self-reproducing mode by power
//! iteration, and turns the resulting transfer efficiencies into output
//! power, frequency-doubled communication power, SNR and spectral
//! efficiency. Both a direct line-of-sight path and a path folded by an
//! intelligent reflecting surface (IRS) are modelled.

pub mod allocator;
pub mod calibrate;
pub mod cavity;
pub mod error;
mod fft;
pub mod grid;
pub mod metrics;
pub mod optics;
pub mod power;
pub mod scenario;

pub use error::{Error, Result, ScenarioError};
pub use grid::{make_field, ComplexField, GridSpec, Profile, C64};
