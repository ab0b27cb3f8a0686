use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, C64};

/// Edge from which an obstructing object enters the beam.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Side {
    PlusX,
    #[default]
    MinusX,
    PlusY,
    MinusY,
}

impl Side {
    /// Signed coordinate along the side's outward direction.
    fn along(self, x: f64, y: f64) -> f64 {
        match self {
            Side::PlusX => x,
            Side::MinusX => -x,
            Side::PlusY => y,
            Side::MinusY => -y,
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "+x" | "x" => Ok(Side::PlusX),
            "-x" => Ok(Side::MinusX),
            "+y" | "y" => Ok(Side::PlusY),
            "-y" => Ok(Side::MinusY),
            other => Err(format!("unknown side `{other}` (expected +x, -x, +y or -y)")),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::PlusX => "+x",
            Side::MinusX => "-x",
            Side::PlusY => "+y",
            Side::MinusY => "-y",
        })
    }
}

pub(crate) fn disc_mask(spec: GridSpec, radius: f64) -> Vec<bool> {
    let xs = spec.coords();
    let r2 = radius * radius;
    let mut m = Vec::with_capacity(spec.len());
    for y in &xs {
        for x in &xs {
            m.push(x * x + y * y <= r2);
        }
    }
    m
}

pub(crate) fn obstruction_mask(spec: GridSpec, radius: f64, depth: f64, side: Side) -> Vec<bool> {
    let xs = spec.coords();
    let r2 = radius * radius;
    let edge = radius - depth;
    let mut m = Vec::with_capacity(spec.len());
    for y in &xs {
        for x in &xs {
            m.push(x * x + y * y <= r2 && side.along(*x, *y) <= edge);
        }
    }
    m
}

/// Pupil of a thin lens: quadratic phase inside `radius`, zero outside.
pub(crate) fn lens_pupil(spec: GridSpec, wavelength: f64, radius: f64, focal: f64) -> Vec<C64> {
    let xs = spec.coords();
    let r2 = radius * radius;
    let mut p = Vec::with_capacity(spec.len());
    for y in &xs {
        for x in &xs {
            let rr = x * x + y * y;
            p.push(if rr <= r2 {
                C64::from_polar(1.0, -PI * rr / (wavelength * focal))
            } else {
                C64::new(0.0, 0.0)
            });
        }
    }
    p
}

pub(crate) fn mask_in_place(values: &mut [C64], mask: &[bool]) {
    for (v, keep) in values.iter_mut().zip(mask) {
        if !keep {
            *v = C64::new(0.0, 0.0);
        }
    }
}

pub(crate) fn multiply_in_place(values: &mut [C64], by: &[C64]) {
    values.iter_mut().zip(by).for_each(|(v, p)| *v *= p);
}

fn masked(f: &ComplexField, mask: &[bool]) -> ComplexField {
    let mut v = f.values().to_vec();
    mask_in_place(&mut v, mask);
    f.with_values(v)
}

pub fn apply_aperture(f: &ComplexField, radius: f64) -> ComplexField {
    masked(f, &disc_mask(f.spec(), radius))
}

pub fn apply_lens(f: &ComplexField, radius: f64, focal: f64) -> Result<ComplexField> {
    if focal == 0.0 || focal.is_nan() {
        return Err(Error::Domain("lens focal length must be non-zero".into()));
    }
    let mut v = f.values().to_vec();
    multiply_in_place(&mut v, &lens_pupil(f.spec(), f.wavelength(), radius, focal));
    Ok(f.with_values(v))
}

pub(crate) fn check_obstruction(radius: f64, depth: f64) -> Result<()> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!(
            "obstruction radius must be positive, got {radius}"
        )));
    }
    if !(0.0..=2.0 * radius).contains(&depth) {
        return Err(Error::Domain(format!(
            "obstruction depth {depth} m outside [0, {}] m",
            2.0 * radius
        )));
    }
    Ok(())
}

pub fn apply_obstruction(f: &ComplexField, radius: f64, depth: f64, side: Side) -> Result<ComplexField> {
    check_obstruction(radius, depth)?;
    Ok(masked(f, &obstruction_mask(f.spec(), radius, depth, side)))
}
