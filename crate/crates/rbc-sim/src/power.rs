//! Laser output power, second-harmonic conversion and the split of the
//! doubled beam between the two channels.

use std::f64::consts::PI;

use crate::cavity::SegmentEfficiencies;
use crate::error::{Error, Result};

pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Gain medium and reflector parameters. Reflectivities are power
/// reflectivities; `r_i` is the transmitter reflector seen by the
/// fundamental inside the cavity, `r_i_v` the dichroic input mirror used on
/// the doubled path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaserParams {
    pub p_i: f64,
    pub eta_e: f64,
    pub a_g: f64,
    pub a_b: f64,
    pub i_s: f64,
    pub r_i: f64,
    pub r_i_v: f64,
    pub r_i_2v: f64,
    pub r_o: f64,
    pub r_o_2v: f64,
    pub r_e: f64,
    pub t_s: f64,
    pub eta_g: f64,
}

impl LaserParams {
    pub fn validate(&self) -> Result<()> {
        let unit = [
            ("eta_e", self.eta_e),
            ("R_i", self.r_i),
            ("R_i_v", self.r_i_v),
            ("R_i_2v", self.r_i_2v),
            ("R_o", self.r_o),
            ("R_o_2v", self.r_o_2v),
            ("R_E", self.r_e),
            ("T_S", self.t_s),
            ("eta_g", self.eta_g),
        ];
        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} outside [0, 1]")));
            }
        }
        for (name, v) in [("P_i", self.p_i), ("A_g", self.a_g), ("A_b", self.a_b), ("I_s", self.i_s)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be non-negative")));
            }
        }
        Ok(())
    }
}

/// Nonlinear crystal used for frequency doubling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShgCrystal {
    pub c_n: f64,
    pub l_s: f64,
    pub n_idx: f64,
    pub epsilon: f64,
    pub c: f64,
    /// Beam radius inside the crystal.
    pub beam_radius: f64,
    /// Fundamental wavelength.
    pub wavelength: f64,
}

impl ShgCrystal {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("C_n", self.c_n),
            ("l_s", self.l_s),
            ("epsilon", self.epsilon),
            ("c", self.c),
            ("beam_radius", self.beam_radius),
            ("wavelength", self.wavelength),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.n_idx >= 1.0) {
            return Err(Error::Config(format!(
                "refractive index {} must be at least 1",
                self.n_idx
            )));
        }
        Ok(())
    }
}

pub fn small_signal_gain(p: &LaserParams) -> f64 {
    p.eta_e * p.p_i / (p.a_g * p.i_s)
}

/// `R_i_v · T_S² · (1 − η_S)² · R_E`.
pub fn equivalent_input_reflectivity(p: &LaserParams, eta_s: f64) -> f64 {
    p.r_i_v * p.t_s * p.t_s * (1.0 - eta_s).powi(2) * p.r_e
}

/// Effective transmitter reflectivity closing the fundamental cavity. The
/// conversion loss is not fed back into the cavity balance.
pub fn cavity_input_reflectivity(p: &LaserParams) -> f64 {
    p.r_i * p.t_s * p.t_s * p.r_e
}

/// Round-trip loss `|ln √(R_i R_o η_g² η_o)|`.
pub fn threshold_loss(r_i_eff: f64, r_o: f64, eta_g: f64, eta_o: f64) -> Result<f64> {
    let arg = r_i_eff * r_o * eta_g * eta_g * eta_o;
    if !(arg > 0.0 && arg <= 1.0) {
        return Err(Error::Domain(format!(
            "round-trip loss argument {arg} outside (0, 1]"
        )));
    }
    Ok((0.5 * arg.ln()).abs())
}

/// Fundamental output power; zero at or below threshold.
#[allow(clippy::too_many_arguments)]
pub fn output_power(
    g0l: f64,
    r_i_eff: f64,
    r_o: f64,
    eta_g: f64,
    eta_o: f64,
    eta_go: f64,
    a_b: f64,
    i_s: f64,
) -> Result<f64> {
    let loss = threshold_loss(r_i_eff, r_o, eta_g, eta_o)?;
    if g0l <= loss {
        return Ok(0.0);
    }
    Ok(a_b * i_s * (1.0 - r_o) * eta_go * (g0l - loss) / (2.0 * loss))
}

/// Undepleted-pump conversion efficiency, clamped to 1.
pub fn shg_efficiency(crystal: &ShgCrystal, p_incident: f64) -> f64 {
    let w = crystal.beam_radius;
    let intensity = 2.0 * p_incident / (PI * w * w);
    let k = 8.0 * PI * PI * crystal.c_n.powi(2) * crystal.l_s.powi(2)
        / (crystal.epsilon * crystal.c * crystal.wavelength.powi(2) * crystal.n_idx.powi(3));
    (intensity * k).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DoubledChain {
    pub p_t_v: f64,
    pub eta_s: f64,
    pub p_t_2v: f64,
    pub p_o_2v: f64,
}

/// Fundamental power at the transmitter and the doubled powers derived
/// from it.
pub fn doubled_chain(
    p_o: f64,
    p: &LaserParams,
    crystal: &ShgCrystal,
    eta_ig: f64,
    eta_go: f64,
) -> Result<DoubledChain> {
    if p_o == 0.0 {
        return Ok(DoubledChain::default());
    }
    let den = (1.0 - p.r_o) * eta_ig * eta_go;
    if !(den > 0.0) {
        return Err(Error::Domain(
            "zero output coupling or transfer efficiency with non-zero output power".into(),
        ));
    }
    let p_t_v = p_o / den;
    let eta_s = shg_efficiency(crystal, p_t_v);
    let p_t_2v = p_t_v * eta_s * (1.0 - p.r_i_v) * p.r_e;
    let p_o_2v = p_t_2v * p.r_i_2v * eta_ig * eta_go * (1.0 - p.r_o_2v);
    Ok(DoubledChain {
        p_t_v,
        eta_s,
        p_t_2v,
        p_o_2v,
    })
}

/// Communication powers `(P_oc_d, P_oc_i)` for split ratio `gamma`.
#[allow(clippy::too_many_arguments)]
pub fn split_powers(
    p_t_2v: f64,
    gamma: f64,
    eta_ig: f64,
    eta_go_direct: f64,
    eta_gr: f64,
    eta_irs: f64,
    eta_ro: f64,
    p: &LaserParams,
) -> (f64, f64) {
    let common = p_t_2v * (1.0 - p.r_i_2v) * eta_ig * (1.0 - p.r_o_2v);
    (
        gamma * common * eta_go_direct,
        (1.0 - gamma) * common * eta_gr * eta_irs * eta_ro,
    )
}

/// Fundamental and doubled powers of one oscillating channel.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ChannelPower {
    pub g0l: f64,
    pub loss: f64,
    pub p_o: f64,
    pub doubled: DoubledChain,
}

/// Evaluates a solved channel. `eta_o` is the round-trip efficiency.
pub fn channel_power(
    p: &LaserParams,
    crystal: &ShgCrystal,
    eta_o: f64,
    seg: &SegmentEfficiencies,
) -> Result<ChannelPower> {
    let g0l = small_signal_gain(p);
    let r_i_eff = cavity_input_reflectivity(p);
    if eta_o <= 0.0 || r_i_eff * p.r_o * p.eta_g <= 0.0 {
        return Ok(ChannelPower {
            g0l,
            loss: f64::INFINITY,
            ..ChannelPower::default()
        });
    }
    let loss = threshold_loss(r_i_eff, p.r_o, p.eta_g, eta_o.min(1.0))?;
    let p_o = output_power(g0l, r_i_eff, p.r_o, p.eta_g, eta_o.min(1.0), seg.go, p.a_b, p.i_s)?;
    let doubled = doubled_chain(p_o, p, crystal, seg.ig, seg.go)?;
    Ok(ChannelPower {
        g0l,
        loss,
        p_o,
        doubled,
    })
}

/// Full budget for one operating point.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PowerBudget {
    pub g0l: f64,
    pub p_o: f64,
    pub p_t_v: f64,
    pub eta_s: f64,
    pub p_t_2v: f64,
    pub p_o_2v: f64,
    pub p_oc_d: f64,
    pub p_oc_i: f64,
    pub p_oc: f64,
    pub gamma: f64,
}
