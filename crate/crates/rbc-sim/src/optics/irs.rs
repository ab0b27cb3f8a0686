use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, C64};

use super::Direction;

/// Placement of an intelligent reflecting surface between Tx and Rx.
///
/// Angles follow the spherical convention of the IRS frame: `theta` is the
/// polar angle from the surface normal and `phi` the azimuth in the surface
/// plane. `dx_i` and `dx_r` are the Tx→IRS and IRS→Rx offsets measured along
/// the surface x-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IrsGeometry {
    pub theta_i: f64,
    pub phi_i: f64,
    pub theta_r: f64,
    pub phi_r: f64,
    pub dx_i: f64,
    pub dx_r: f64,
    pub amplitude: f64,
}

impl IrsGeometry {
    /// Symmetric fold with the Tx→Rx baseline `z`: both legs at 45° so that
    /// each has length `z/√2`.
    pub fn folded(z: f64) -> Self {
        Self {
            theta_i: PI / 4.0,
            phi_i: PI,
            theta_r: PI / 4.0,
            phi_r: 0.0,
            dx_i: z / 2.0,
            dx_r: z / 2.0,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("theta_i", self.theta_i), ("theta_r", self.theta_r)] {
            if !(t > 0.0 && t < PI) {
                return Err(Error::Geometry(format!("{name} = {t} rad outside (0, pi)")));
            }
        }
        if !(self.amplitude > 0.0 && self.amplitude <= 1.0) {
            return Err(Error::Config(format!(
                "IRS amplitude reflection {} outside (0, 1]",
                self.amplitude
            )));
        }
        irs_path_lengths(self).map(|_| ())
    }
}

/// Constant phase-gradient `(Γx, Γy)` that steers the incident beam into the
/// reflection direction. Components at trigonometric roundoff level are
/// returned as exact zeros.
pub fn irs_phase_gradient(g: &IrsGeometry) -> (f64, f64) {
    let si = (FRAC_PI_2 - g.theta_i).cos();
    let sr = (FRAC_PI_2 - g.theta_r).cos();
    let snap = |v: f64| if v.abs() < GRADIENT_ROUNDOFF { 0.0 } else { v };
    (
        snap(si * g.phi_i.cos() + sr * g.phi_r.cos()),
        snap(si * g.phi_i.sin() + sr * g.phi_r.sin()),
    )
}

const GRADIENT_ROUNDOFF: f64 = 1e-14;

/// Multiplies the field by the surface response `m·exp(jΓ(x, y))`.
/// `Reverse` applies the opposite gradient.
pub fn apply_irs(f: &ComplexField, g: &IrsGeometry, direction: Direction) -> ComplexField {
    let (gx, gy) = irs_phase_gradient(g);
    let k = 2.0 * PI / f.wavelength() * direction.sign();
    let xs = f.spec().coords();
    let n = xs.len();
    let mut v = f.values().to_vec();
    if gx == 0.0 && gy == 0.0 {
        v.iter_mut().for_each(|c| *c *= g.amplitude);
        return f.with_values(v);
    }
    for (iy, y) in xs.iter().enumerate() {
        for (ix, x) in xs.iter().enumerate() {
            v[iy * n + ix] *= C64::from_polar(g.amplitude, k * (gx * x + gy * y));
        }
    }
    f.with_values(v)
}

/// Tx→IRS and IRS→Rx path lengths `(d_ti, d_ir)`.
pub fn irs_path_lengths(g: &IrsGeometry) -> Result<(f64, f64)> {
    let den_i = -g.phi_i.cos() * g.theta_i.sin();
    let den_r = g.phi_r.cos() * g.theta_r.sin();
    if den_i == 0.0 || den_r == 0.0 {
        return Err(Error::Geometry(
            "incidence or reflection direction is parallel to the surface".into(),
        ));
    }
    let d_ti = g.dx_i / den_i;
    let d_ir = g.dx_r / den_r;
    if !(d_ti > 0.0 && d_ti.is_finite()) {
        return Err(Error::Geometry(format!(
            "Tx→IRS path length {d_ti} m is not positive; the beam cannot reach the surface"
        )));
    }
    if !(d_ir > 0.0 && d_ir.is_finite()) {
        return Err(Error::Geometry(format!(
            "IRS→Rx path length {d_ir} m is not positive; the beam cannot reach the receiver"
        )));
    }
    Ok((d_ti, d_ir))
}
