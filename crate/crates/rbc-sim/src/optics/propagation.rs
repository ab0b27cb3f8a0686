use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fft::{crop, embed, fft2, ifft2};
use crate::grid::{ComplexField, GridSpec, C64};

use super::Direction;

/// Angular-spectrum transfer function in FFT order, optionally carrying a
/// lateral shift `(dx, dy)`. Evanescent bins are zero.
pub fn transfer_function(spec: GridSpec, wavelength: f64, z: f64, shift: (f64, f64)) -> Vec<C64> {
    let n = spec.n();
    let nu = spec.freqs();
    let inv_l = 1.0 / wavelength;
    let inv_l2 = inv_l * inv_l;
    let carrier = C64::from_polar(1.0, 2.0 * PI * z * inv_l);
    let mut h = vec![C64::new(0.0, 0.0); n * n];
    for (ky, vy) in nu.iter().enumerate() {
        for (kx, vx) in nu.iter().enumerate() {
            let rho2 = vx * vx + vy * vy;
            if inv_l2 - rho2 < 0.0 {
                continue;
            }
            // w - 1/λ without cancellation
            let dw = -rho2 / ((inv_l2 - rho2).sqrt() + inv_l);
            let phase = 2.0 * PI * (z * dw + vx * shift.0 + vy * shift.1);
            h[ky * n + kx] = carrier * C64::from_polar(1.0, phase);
        }
    }
    h
}

/// Multiplies the spectrum of `values` by `h`, in place.
pub(crate) fn filter_in_place(values: &mut [C64], n: usize, h: &[C64]) {
    fft2(values, n);
    values.iter_mut().zip(h).for_each(|(v, t)| *v *= t);
    ifft2(values, n);
}

/// Same as [`filter_in_place`] on a 2× zero-padded copy, cropped back.
pub(crate) fn filter_padded_in_place(values: &mut [C64], n: usize, h_padded: &[C64]) {
    let mut big = embed(values, n);
    filter_in_place(&mut big, 2 * n, h_padded);
    crop(&big, n, values);
}

/// Free-space propagation over `z` metres; negative `z` runs backwards.
pub fn propagate(f: &ComplexField, z: f64) -> ComplexField {
    if z == 0.0 {
        return f.clone();
    }
    let spec = f.spec();
    let h = transfer_function(spec, f.wavelength(), z, (0.0, 0.0));
    let mut out = f.values().to_vec();
    filter_in_place(&mut out, spec.n(), &h);
    f.with_values(out)
}

/// [`propagate`] on a 2× zero-padded window to suppress wraparound.
pub fn propagate_padded(f: &ComplexField, z: f64) -> ComplexField {
    if z == 0.0 {
        return f.clone();
    }
    let spec = f.spec();
    let h = transfer_function(spec.doubled(), f.wavelength(), z, (0.0, 0.0));
    let mut out = f.values().to_vec();
    filter_padded_in_place(&mut out, spec.n(), &h);
    f.with_values(out)
}

pub(crate) fn check_shift(spec: GridSpec, dx: f64, dy: f64) -> Result<()> {
    let limit = spec.half_width() / 2.0;
    if !(dx.abs() < limit && dy.abs() < limit) {
        return Err(Error::Config(format!(
            "lateral shift ({dx}, {dy}) m must stay below half the window half-width ({limit} m)"
        )));
    }
    Ok(())
}

/// Propagation to a laterally displaced receiver plane.
///
/// `Reverse` is the exact inverse of `Forward` with the same arguments.
pub fn propagate_shifted(
    f: &ComplexField,
    z: f64,
    dx: f64,
    dy: f64,
    direction: Direction,
) -> Result<ComplexField> {
    let spec = f.spec();
    check_shift(spec, dx, dy)?;
    if dx == 0.0 && dy == 0.0 {
        return Ok(propagate(f, direction.sign() * z));
    }
    let s = direction.sign();
    let h = transfer_function(spec, f.wavelength(), s * z, (s * dx, s * dy));
    let mut out = f.values().to_vec();
    filter_in_place(&mut out, spec.n(), &h);
    Ok(f.with_values(out))
}

/// Weight applied by [`fresnel_reference`] to a source cell displaced by
/// `(dx, dy)` from the observation point.
pub fn fresnel_kernel(spec: GridSpec, wavelength: f64, z: f64, dx: f64, dy: f64) -> C64 {
    let k = 2.0 * PI / wavelength;
    let d = spec.pitch();
    let pre = C64::from_polar(1.0, k * z) / C64::new(0.0, wavelength * z);
    pre * C64::from_polar(d * d, k * (dx * dx + dy * dy) / (2.0 * z))
}

/// Direct quadrature of the Fresnel diffraction integral. O(n³) thanks to
/// the separable kernel; intended for small grids.
pub fn fresnel_reference(f: &ComplexField, z: f64) -> Result<ComplexField> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("fresnel_reference needs z > 0, got {z}")));
    }
    let spec = f.spec();
    let n = spec.n();
    let lam = f.wavelength();
    let k = 2.0 * PI / lam;
    let xs = spec.coords();
    let mut kern = vec![C64::new(0.0, 0.0); n * n];
    for (i, xi) in xs.iter().enumerate() {
        for (j, xj) in xs.iter().enumerate() {
            let d = xi - xj;
            kern[i * n + j] = C64::from_polar(1.0, k * d * d / (2.0 * z));
        }
    }
    let src = f.values();
    // rows: a[y1][x] = Σ_x1 K[x][x1] f[y1][x1]
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for y1 in 0..n {
        let row = &src[y1 * n..(y1 + 1) * n];
        for x in 0..n {
            let kr = &kern[x * n..(x + 1) * n];
            a[y1 * n + x] = kr.iter().zip(row).map(|(p, q)| p * q).sum();
        }
    }
    let d = spec.pitch();
    let pre = C64::from_polar(1.0, k * z) / C64::new(0.0, lam * z) * (d * d);
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for y in 0..n {
        let kr = &kern[y * n..(y + 1) * n];
        for x in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for y1 in 0..n {
                acc += kr[y1] * a[y1 * n + x];
            }
            out[y * n + x] = pre * acc;
        }
    }
    Ok(f.with_values(out))
}
