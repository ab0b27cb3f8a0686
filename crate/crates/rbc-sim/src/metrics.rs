//! Receiver SNR and spectral efficiency.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
pub const BOLTZMANN: f64 = 1.380_649e-23;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorParams {
    /// Responsivity (A/W).
    pub eta_c: f64,
    /// Background current (A).
    pub i_k: f64,
    /// Noise bandwidth (Hz).
    pub b: f64,
    /// Load resistance (Ω).
    pub l_r: f64,
    pub q: f64,
    pub k_b: f64,
    /// Temperature (K).
    pub t: f64,
    /// Channel bandwidth (Hz).
    pub b_c: f64,
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta_c", self.eta_c),
            ("I_k", self.i_k),
            ("B", self.b),
            ("L_r", self.l_r),
            ("q", self.q),
            ("K_b", self.k_b),
            ("T", self.t),
            ("B_c", self.b_c),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("detector {name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Snr {
    pub linear: f64,
    /// `-inf` when no power arrives.
    pub db: f64,
}

pub fn snr(p_oc: f64, d: &DetectorParams) -> Snr {
    let signal = (d.eta_c * p_oc).powi(2);
    let noise = 2.0 * PI * E
        * (2.0 * d.q * (d.eta_c * p_oc + d.i_k) * d.b + 4.0 * d.k_b * d.t * d.b / d.l_r);
    let linear = signal / noise;
    Snr {
        linear,
        db: 10.0 * linear.log10(),
    }
}

/// `log2(1 + SNR)` in bit/s/Hz.
pub fn spectral_efficiency(snr_linear: f64) -> f64 {
    (1.0 + snr_linear).log2()
}

/// `B_c · log2(1 + SNR)` in bit/s.
pub fn capacity(snr_linear: f64, d: &DetectorParams) -> f64 {
    d.b_c * spectral_efficiency(snr_linear)
}
