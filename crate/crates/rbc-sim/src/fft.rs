//! Two-dimensional FFT on square row-major buffers, with per-thread plan reuse.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::grid::C64;

pub(crate) struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    tmp: Vec<C64>,
}

impl Fft2 {
    fn new(planner: &mut FftPlanner<f64>, n: usize) -> Self {
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            n,
            fwd,
            inv,
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
            tmp: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub(crate) fn forward(&mut self, data: &mut [C64]) {
        self.run(data, false);
    }

    /// Inverse transform including the `1/n²` normalisation.
    pub(crate) fn inverse(&mut self, data: &mut [C64]) {
        self.run(data, true);
        let s = 1.0 / (self.n * self.n) as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    fn run(&mut self, data: &mut [C64], inverse: bool) {
        assert_eq!(data.len(), self.n * self.n);
        let plan = if inverse { &self.inv } else { &self.fwd };
        plan.process_with_scratch(data, &mut self.scratch);
        transpose(data, &mut self.tmp, self.n);
        plan.process_with_scratch(&mut self.tmp, &mut self.scratch);
        transpose(&self.tmp, data, self.n);
    }
}

fn transpose(src: &[C64], dst: &mut [C64], n: usize) {
    const B: usize = 32;
    for by in (0..n).step_by(B) {
        for bx in (0..n).step_by(B) {
            for y in by..(by + B).min(n) {
                for x in bx..(bx + B).min(n) {
                    dst[x * n + y] = src[y * n + x];
                }
            }
        }
    }
}

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<usize, Fft2>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

/// Runs `f` with a cached transform for side length `n`.
pub(crate) fn with_fft<R>(n: usize, f: impl FnOnce(&mut Fft2) -> R) -> R {
    let mut plan = PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache.remove(&n).unwrap_or_else(|| Fft2::new(planner, n))
    });
    let out = f(&mut plan);
    PLANS.with(|cell| cell.borrow_mut().1.insert(n, plan));
    out
}

pub(crate) fn fft2(data: &mut [C64], n: usize) {
    with_fft(n, |p| p.forward(data));
}

pub(crate) fn ifft2(data: &mut [C64], n: usize) {
    with_fft(n, |p| p.inverse(data));
}

/// Swaps quadrants; its own inverse for even `n`.
pub(crate) fn swap_quadrants(data: &mut [C64], n: usize) {
    let h = n / 2;
    for y in 0..h {
        for x in 0..n {
            let a = y * n + x;
            let b = (y + h) * n + (x + h) % n;
            data.swap(a, b);
        }
    }
}

/// Centres an `n`-grid inside a zeroed `2n`-grid.
pub(crate) fn embed(src: &[C64], n: usize) -> Vec<C64> {
    let m = 2 * n;
    let off = n / 2;
    let mut out = vec![C64::new(0.0, 0.0); m * m];
    for y in 0..n {
        let row = &src[y * n..(y + 1) * n];
        out[(y + off) * m + off..(y + off) * m + off + n].copy_from_slice(row);
    }
    out
}

/// Inverse of [`embed`]: extracts the central `n`-grid.
pub(crate) fn crop(src: &[C64], n: usize, dst: &mut [C64]) {
    let m = 2 * n;
    let off = n / 2;
    for y in 0..n {
        dst[y * n..(y + 1) * n]
            .copy_from_slice(&src[(y + off) * m + off..(y + off) * m + off + n]);
    }
}
