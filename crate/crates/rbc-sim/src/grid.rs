//! Sampled complex fields on a square physical window.
//!
//! Samples sit at cell centres with the origin at the centre of the window,
//! so sample `i` along an axis is at `(i - n/2 + 1/2) * pitch`. Values are
//! stored row-major: index `iy * n + ix`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Phase spread of the seeded random-phase disc, in radians.
pub const SEED_PHASE_SPREAD: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Config(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn pitch(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical coordinate of sample `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.n as f64 / 2.0 + 0.5) * self.pitch()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Spatial frequency of FFT bin `k` (cycles per metre).
    pub fn freq(&self, k: usize) -> f64 {
        let n = self.n as i64;
        let k = k as i64;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 / (self.n as f64 * self.pitch())
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.freq(k)).collect()
    }

    /// Frequency spacing of the FFT grid.
    pub fn freq_step(&self) -> f64 {
        1.0 / (self.n as f64 * self.pitch())
    }

    /// Same pitch, twice the samples per side.
    pub fn doubled(&self) -> Self {
        Self {
            n: self.n * 2,
            half_width: self.half_width * 2.0,
        }
    }
}

/// Analytic initial field shapes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    UniformDisc { radius: f64 },
    Gaussian { waist: f64 },
    UniformPlane,
    SeededPhaseDisc { radius: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    spec: GridSpec,
    wavelength: f64,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn from_values(spec: GridSpec, wavelength: f64, values: Vec<C64>) -> Result<Self> {
        check_wavelength(wavelength)?;
        if values.len() != spec.len() {
            return Err(Error::Config(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("field contains non-finite samples".into()));
        }
        Ok(Self {
            spec,
            wavelength,
            values,
        })
    }

    pub fn zeros(spec: GridSpec, wavelength: f64) -> Result<Self> {
        check_wavelength(wavelength)?;
        Ok(Self {
            spec,
            wavelength,
            values: vec![C64::new(0.0, 0.0); spec.len()],
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> C64 {
        self.values[iy * self.spec.n + ix]
    }

    /// Same grid and wavelength, new samples. Length is the caller's duty.
    pub(crate) fn with_values(&self, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), self.spec.len());
        Self {
            spec: self.spec,
            wavelength: self.wavelength,
            values,
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        self.with_values(self.values.iter().map(|v| v * c).collect())
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn l1_norm(&self) -> f64 {
        l1_norm(self)
    }

    pub fn l2_power(&self) -> f64 {
        l2_power(self)
    }
}

fn check_wavelength(wavelength: f64) -> Result<()> {
    if wavelength.is_finite() && wavelength > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "wavelength must be positive, got {wavelength}"
        )))
    }
}

pub fn make_field(spec: GridSpec, wavelength: f64, profile: Profile) -> Result<ComplexField> {
    check_wavelength(wavelength)?;
    let clip_check = |what: &str, r: f64| {
        if !(r.is_finite() && r > 0.0) {
            Err(Error::Config(format!("{what} must be positive, got {r}")))
        } else if r > spec.half_width() {
            Err(Error::Config(format!(
                "{what} {r} m exceeds the window half-width {} m",
                spec.half_width()
            )))
        } else {
            Ok(())
        }
    };
    let n = spec.n();
    let xs = spec.coords();
    let mut values = vec![C64::new(0.0, 0.0); spec.len()];
    match profile {
        Profile::UniformPlane => values.fill(C64::new(1.0, 0.0)),
        Profile::UniformDisc { radius } => {
            clip_check("disc radius", radius)?;
            let r2 = radius * radius;
            for (iy, y) in xs.iter().enumerate() {
                for (ix, x) in xs.iter().enumerate() {
                    if x * x + y * y <= r2 {
                        values[iy * n + ix] = C64::new(1.0, 0.0);
                    }
                }
            }
        }
        Profile::Gaussian { waist } => {
            clip_check("waist", waist)?;
            let w2 = waist * waist;
            for (iy, y) in xs.iter().enumerate() {
                for (ix, x) in xs.iter().enumerate() {
                    values[iy * n + ix] = C64::new((-(x * x + y * y) / w2).exp(), 0.0);
                }
            }
        }
        Profile::SeededPhaseDisc { radius, seed } => {
            clip_check("disc radius", radius)?;
            let r2 = radius * radius;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (iy, y) in xs.iter().enumerate() {
                for (ix, x) in xs.iter().enumerate() {
                    let phase = rng.gen_range(-SEED_PHASE_SPREAD..=SEED_PHASE_SPREAD);
                    if x * x + y * y <= r2 {
                        values[iy * n + ix] = C64::from_polar(1.0, phase);
                    }
                }
            }
        }
    }
    Ok(ComplexField {
        spec,
        wavelength,
        values,
    })
}

/// Sum of sample magnitudes.
pub fn l1_norm(f: &ComplexField) -> f64 {
    f.values.iter().map(|v| v.norm()).sum()
}

/// Discrete integral of intensity over the window.
pub fn l2_power(f: &ComplexField) -> f64 {
    let d = f.spec.pitch();
    sum_sqr(&f.values) * d * d
}

pub(crate) fn sum_sqr(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum()
}

/// Relative L2 distance `|a - b| / |b|`.
pub fn relative_l2_error(a: &ComplexField, b: &ComplexField) -> f64 {
    let num: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let den = sum_sqr(&b.values);
    (num / den).sqrt()
}

/// Second-moment (1/e² intensity) beam radius `sqrt(2 <r²>)`.
pub fn beam_radius(f: &ComplexField) -> f64 {
    let xs = f.spec.coords();
    let n = f.spec.n();
    let (mut total, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for iy in 0..n {
        for ix in 0..n {
            let w = f.values[iy * n + ix].norm_sqr();
            total += w;
            cx += w * xs[ix];
            cy += w * xs[iy];
        }
    }
    cx /= total;
    cy /= total;
    let mut m2 = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let w = f.values[iy * n + ix].norm_sqr();
            let (dx, dy) = (xs[ix] - cx, xs[iy] - cy);
            m2 += w * (dx * dx + dy * dy);
        }
    }
    (2.0 * m2 / total).sqrt()
}

/// Intensity-weighted centroid `(x, y)`.
pub fn centroid(f: &ComplexField) -> (f64, f64) {
    let xs = f.spec.coords();
    let n = f.spec.n();
    let (mut total, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for iy in 0..n {
        for ix in 0..n {
            let w = f.values[iy * n + ix].norm_sqr();
            total += w;
            cx += w * xs[ix];
            cy += w * xs[iy];
        }
    }
    (cx / total, cy / total)
}
