//! Receiver rotation and translation.
//!
//! A rotated receiver samples the field on a tilted plane. The field is
//! carried as its angular spectrum, re-expressed in the receiver frame and
//! resampled bilinearly. The strong linear phase of a tilted plane (its
//! carrier) is removed so the resampled spectrum stays on the grid.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fft::{fft2, ifft2, swap_quadrants};
use crate::grid::{ComplexField, GridSpec, C64};

use super::propagation::transfer_function;
use super::Direction;

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(format!("unknown rotation axis `{other}`")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Counter-clockwise rotation by `angle` about `axis`.
pub fn axis_rotation(axis: Axis, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    match axis {
        Axis::X => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        Axis::Y => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
        Axis::Z => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
    }
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat_vec(a: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

/// Receiver displacement: lateral/axial shift plus an ordered list of
/// elementary rotations, composed left to right.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MisalignmentSpec {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub rotation: Vec<(Axis, f64)>,
}

impl MisalignmentSpec {
    pub fn translation(dx: f64, dy: f64, dz: f64) -> Self {
        Self {
            dx,
            dy,
            dz,
            rotation: Vec::new(),
        }
    }

    pub fn rotation(list: Vec<(Axis, f64)>) -> Self {
        Self {
            rotation: list,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.dx, self.dy, self.dz].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("translation must be finite".into()));
        }
        if self.rotation.len() > 3 {
            return Err(Error::Config(format!(
                "at most 3 elementary rotations allowed, got {}",
                self.rotation.len()
            )));
        }
        for (axis, angle) in &self.rotation {
            if !angle.is_finite() {
                return Err(Error::Domain("rotation angle must be finite".into()));
            }
            if *axis != Axis::Z && angle.abs() >= FRAC_PI_2 {
                return Err(Error::Domain(format!(
                    "rotation of {:.3} deg about {axis} tilts the receiver out of the beam",
                    angle.to_degrees()
                )));
            }
        }
        if self.matrix()[2][2] <= 0.0 {
            return Err(Error::Domain(
                "composed rotation turns the receiver away from the beam".into(),
            ));
        }
        Ok(())
    }

    pub fn matrix(&self) -> Mat3 {
        self.rotation
            .iter()
            .fold(IDENTITY, |m, (axis, angle)| mat_mul(&m, &axis_rotation(*axis, *angle)))
    }

    /// Negated angles in reverse order; the matrix is the transpose.
    pub fn inverse_rotation(&self) -> Vec<(Axis, f64)> {
        self.rotation.iter().rev().map(|(a, t)| (*a, -t)).collect()
    }

    pub fn has_rotation(&self) -> bool {
        self.rotation.iter().any(|(_, t)| *t != 0.0)
    }

    pub fn has_translation(&self) -> bool {
        self.dx != 0.0 || self.dy != 0.0 || self.dz != 0.0
    }
}

pub fn rotate_point(p: [f64; 3], rotation: &MisalignmentSpec) -> [f64; 3] {
    mat_vec(&rotation.matrix(), p)
}

/// `|J|` of the frequency mapping `ν = A·ν̂` at the output frequency
/// `(vx, vy)` with axial component `w`.
pub fn jacobian(a: &Mat3, vx: f64, vy: f64, w: f64) -> f64 {
    let (a1, a2, a3) = (a[0][0], a[0][1], a[0][2]);
    let (a4, a5, a6) = (a[1][0], a[1][1], a[1][2]);
    ((a2 * a6 - a3 * a5) * vx / w + (a3 * a4 - a1 * a6) * vy / w + (a1 * a5 - a2 * a4)).abs()
}

/// Transverse frequency of the carrier seen by a receiver rotated by `r`.
pub(crate) fn carrier(r: &Mat3, wavelength: f64) -> (f64, f64) {
    (r[2][0] / wavelength, r[2][1] / wavelength)
}

/// Spectrum with the phase origin at the window centre.
pub(crate) fn to_centred_spectrum(values: &mut [C64], spec: GridSpec) {
    let n = spec.n();
    swap_quadrants(values, n);
    fft2(values, n);
    apply_half_cell_phase(values, spec, -1.0);
}

pub(crate) fn from_centred_spectrum(values: &mut [C64], spec: GridSpec) {
    let n = spec.n();
    apply_half_cell_phase(values, spec, 1.0);
    ifft2(values, n);
    swap_quadrants(values, n);
}

fn apply_half_cell_phase(values: &mut [C64], spec: GridSpec, sign: f64) {
    let n = spec.n();
    let d = spec.pitch();
    let ph: Vec<C64> = spec
        .freqs()
        .iter()
        .map(|v| C64::from_polar(1.0, sign * PI * v * d))
        .collect();
    for ky in 0..n {
        for kx in 0..n {
            values[ky * n + kx] *= ph[kx] * ph[ky];
        }
    }
}

/// Resamples a centred spectrum between frames. Output bin `ν̂' ` (plus the
/// output carrier) maps to input frequency `A·ν̂` (minus the input carrier).
pub(crate) fn resample_spectrum(
    src: &[C64],
    spec: GridSpec,
    wavelength: f64,
    a: &Mat3,
    c_in: (f64, f64),
    c_out: (f64, f64),
) -> Vec<C64> {
    let n = spec.n();
    let nu = spec.freqs();
    let dnu = spec.freq_step();
    let inv_l2 = 1.0 / (wavelength * wavelength);
    let half = (n / 2) as f64;
    let ni = n as i64;
    let bin = |i: i64| (i.rem_euclid(ni)) as usize;
    let sample = |vx: f64, vy: f64| -> C64 {
        let ux = vx / dnu;
        let uy = vy / dnu;
        if !(ux >= -half && ux <= half - 1.0 && uy >= -half && uy <= half - 1.0) {
            return C64::new(0.0, 0.0);
        }
        let (x0, y0) = (ux.floor(), uy.floor());
        let (tx, ty) = (ux - x0, uy - y0);
        let (x0, y0) = (x0 as i64, y0 as i64);
        let at = |x: i64, y: i64| src[bin(y) * n + bin(x)];
        let mut v = at(x0, y0) * ((1.0 - tx) * (1.0 - ty));
        if tx > 0.0 {
            v += at(x0 + 1, y0) * (tx * (1.0 - ty));
        }
        if ty > 0.0 {
            v += at(x0, y0 + 1) * ((1.0 - tx) * ty);
            if tx > 0.0 {
                v += at(x0 + 1, y0 + 1) * (tx * ty);
            }
        }
        v
    };
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for (ky, fy) in nu.iter().enumerate() {
        let vy = fy + c_out.1;
        for (kx, fx) in nu.iter().enumerate() {
            let vx = fx + c_out.0;
            let w2 = inv_l2 - vx * vx - vy * vy;
            if w2 <= 0.0 {
                continue;
            }
            let w = w2.sqrt();
            let ix = a[0][0] * vx + a[0][1] * vy + a[0][2] * w;
            let iy = a[1][0] * vx + a[1][1] * vy + a[1][2] * w;
            let g = sample(ix - c_in.0, iy - c_in.1);
            if g != C64::new(0.0, 0.0) {
                out[ky * n + kx] = g * jacobian(a, vx, vy, w);
            }
        }
    }
    out
}

/// The three spectral steps of a rotated transit, shared by the public
/// operation and compiled cavity chains.
pub(crate) struct RotatedTransit {
    pub spec: GridSpec,
    pub wavelength: f64,
    pub pre: Option<Vec<C64>>,
    pub post: Option<Vec<C64>>,
    pub map: Mat3,
    pub c_in: (f64, f64),
    pub c_out: (f64, f64),
}

impl RotatedTransit {
    /// Propagate (with optional lateral shift) then change to the frame of a
    /// receiver rotated by `r`.
    pub fn outbound(spec: GridSpec, wavelength: f64, z: f64, shift: (f64, f64), r: &Mat3) -> Self {
        Self {
            spec,
            wavelength,
            pre: Some(transfer_function(spec, wavelength, z, shift)),
            post: None,
            map: *r,
            c_in: (0.0, 0.0),
            c_out: carrier(r, wavelength),
        }
    }

    /// Change from the frame of a receiver rotated by `r` back to the
    /// propagation frame, then propagate over `z` with optional shift.
    pub fn inbound(spec: GridSpec, wavelength: f64, z: f64, shift: (f64, f64), r: &Mat3) -> Self {
        Self {
            spec,
            wavelength,
            pre: None,
            post: Some(transfer_function(spec, wavelength, z, shift)),
            map: transpose(r),
            c_in: carrier(r, wavelength),
            c_out: (0.0, 0.0),
        }
    }

    pub fn apply(&self, values: &mut Vec<C64>) {
        to_centred_spectrum(values, self.spec);
        if let Some(h) = &self.pre {
            values.iter_mut().zip(h).for_each(|(v, t)| *v *= t);
        }
        let mut out = resample_spectrum(
            values,
            self.spec,
            self.wavelength,
            &self.map,
            self.c_in,
            self.c_out,
        );
        if let Some(h) = &self.post {
            out.iter_mut().zip(h).for_each(|(v, t)| *v *= t);
        }
        from_centred_spectrum(&mut out, self.spec);
        *values = out;
    }
}

/// Propagation onto a rotated receiver plane. `Reverse` is the exact inverse
/// transit: back to the propagation frame, then propagation over `-z`.
pub fn propagate_rotated(
    f: &ComplexField,
    z: f64,
    rotation: &MisalignmentSpec,
    direction: Direction,
) -> Result<ComplexField> {
    rotation.validate()?;
    let spec = f.spec();
    if !rotation.has_rotation() {
        return Ok(super::propagate(f, direction.sign() * z));
    }
    let r = rotation.matrix();
    let transit = match direction {
        Direction::Forward => RotatedTransit::outbound(spec, f.wavelength(), z, (0.0, 0.0), &r),
        Direction::Reverse => RotatedTransit::inbound(spec, f.wavelength(), -z, (0.0, 0.0), &r),
    };
    let mut v = f.values().to_vec();
    transit.apply(&mut v);
    Ok(f.with_values(v))
}

/// Re-expresses a receiver-frame field in the propagation frame at the same
/// plane (no propagation).
pub fn rotate_to_propagation_frame(f: &ComplexField, rotation: &MisalignmentSpec) -> Result<ComplexField> {
    propagate_rotated(f, 0.0, rotation, Direction::Reverse)
}
