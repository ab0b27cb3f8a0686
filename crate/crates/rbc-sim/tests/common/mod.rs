#![allow(dead_code)]

use std::f64::consts::PI;

use rbc_sim::{make_field, ComplexField, GridSpec, Profile, C64};

pub const LAMBDA: f64 = 1064e-9;

/// Window for which the sampled Fresnel kernel is alias-free: pitch
/// `sqrt(λz/n)`.
pub fn critical_grid(n: usize, wavelength: f64, z: f64) -> GridSpec {
    let pitch = (wavelength * z / n as f64).sqrt();
    GridSpec::new(n, pitch * n as f64 / 2.0).unwrap()
}

/// Brute-force Fresnel diffraction integral, one output cell at a time.
pub fn fresnel_direct(f: &ComplexField, z: f64) -> ComplexField {
    let spec = f.spec();
    let n = spec.n();
    let lam = f.wavelength();
    let k = 2.0 * PI / lam;
    let d = 2.0 * spec.half_width() / n as f64;
    let x = |i: usize| (i as f64 + 0.5) * d - spec.half_width();
    let pre = C64::from_polar(1.0, k * z) / C64::new(0.0, lam * z) * d * d;
    let src: Vec<(f64, f64, C64)> = (0..n * n)
        .filter(|&i| f.values()[i].norm() > 0.0)
        .map(|i| (x(i % n), x(i / n), f.values()[i]))
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for iy in 0..n {
        for ix in 0..n {
            let (xo, yo) = (x(ix), x(iy));
            let mut acc = C64::new(0.0, 0.0);
            for (xs, ys, u) in &src {
                let r2 = (xo - xs).powi(2) + (yo - ys).powi(2);
                acc += u * C64::from_polar(1.0, k * r2 / (2.0 * z));
            }
            out[iy * n + ix] = pre * acc;
        }
    }
    ComplexField::from_values(spec, lam, out).unwrap()
}

pub fn disc(spec: GridSpec, radius: f64) -> ComplexField {
    make_field(spec, LAMBDA, Profile::UniformDisc { radius }).unwrap()
}

pub fn gaussian(spec: GridSpec, waist: f64) -> ComplexField {
    make_field(spec, LAMBDA, Profile::Gaussian { waist }).unwrap()
}

/// Sup-norm of the cellwise difference.
pub fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest residual of a least-squares line through `(x, y)`, relative to
/// the largest `|y|`.
pub fn affine_residual(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    x.iter()
        .zip(y)
        .map(|(a, b)| (b - (my + slope * (a - mx))).abs() / scale)
        .fold(0.0, f64::max)
}
