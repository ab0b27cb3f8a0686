//! One-off fit of the constants the reference link leaves unstated.
//!
//! 1. The lens focal length is bisected until the aligned direct link at the
//!    reference distance reaches the target end-to-end efficiency.
//! 2. For each candidate output reflectivity `R_o`, the excitation
//!    efficiency follows in closed form from the target output power.
//! 3. The crystal beam radius scales the doubled power as `1/ω²`; it is set
//!    to the log-minimax fit of the doubled-power targets, and the `R_o`
//!    with the smallest residual wins.

use crate::error::{Error, Result};
use crate::power::{cavity_input_reflectivity, channel_power, threshold_loss};
use crate::scenario::{Scenario, SolveCache};

#[derive(Clone, Debug, PartialEq)]
pub struct Targets {
    /// Distance of the efficiency and power targets.
    pub distance: f64,
    pub eta_direct: f64,
    pub p_o: f64,
    /// Distance of the doubled-power targets.
    pub doubled_distance: f64,
    /// `(P_i, P_o_2v)` pairs.
    pub doubled: Vec<(f64, f64)>,
}

impl Default for Targets {
    fn default() -> Self {
        Self {
            distance: 5.0,
            eta_direct: 0.9014,
            p_o: 22.54,
            doubled_distance: 3.0,
            doubled: vec![(100.0, 1.16), (200.0, 17.24), (300.0, 69.74)],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub focal: f64,
    pub r_o: f64,
    pub eta_e: f64,
    pub shg_beam_radius: f64,
    /// Largest relative log error of the doubled-power fit.
    pub doubled_misfit: f64,
    pub eta_direct: f64,
    pub eta_irs: f64,
    pub p_o_direct: f64,
    pub p_o_irs: f64,
    /// Fitted scenario.
    pub scenario: Scenario,
}

fn with_focal(base: &Scenario, f: f64) -> Scenario {
    let mut s = base.clone();
    s.tx.focal = f;
    s.rx.focal = f;
    s
}

/// Bisects the focal length in `[lo, hi]` so that the direct-link
/// efficiency at `distance` matches `target`.
pub fn fit_focal(
    base: &Scenario,
    distance: f64,
    target: f64,
    (lo, hi): (f64, f64),
    iterations: usize,
    cache: &SolveCache,
) -> Result<(f64, f64)> {
    let eta = |f: f64| -> Result<f64> {
        let mut s = with_focal(base, f);
        s.distance = distance;
        Ok(cache.solve(&s.direct_channel(), &s)?.e2e - target)
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (eta(a)?, eta(b)?);
    if fa * fb > 0.0 {
        return Err(Error::Domain(format!(
            "efficiency target {target} is not bracketed by focal lengths [{lo}, {hi}] \
             (residuals {fa:.4}, {fb:.4})"
        )));
    }
    for _ in 0..iterations {
        let m = 0.5 * (a + b);
        let fm = eta(m)?;
        if fa * fm <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let f = 0.5 * (a + b);
    Ok((f, eta(f)? + target))
}

/// Runs the full fit starting from `base`.
pub fn calibrate(
    base: &Scenario,
    targets: &Targets,
    focal_bracket: (f64, f64),
    r_o_candidates: &[f64],
) -> Result<Calibration> {
    let cache = SolveCache::new();
    let (focal, _) = fit_focal(base, targets.distance, targets.eta_direct, focal_bracket, 12, &cache)?;
    let mut s = with_focal(base, focal);

    s.distance = targets.distance;
    let near = cache.solve(&s.direct_channel(), &s)?;
    let mut s3 = s.clone();
    s3.distance = targets.doubled_distance;
    let far = cache.solve(&s3.direct_channel(), &s3)?;

    let reference_radius = s.shg.beam_radius;
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for &r_o in r_o_candidates {
        let mut laser = s.laser;
        laser.r_o = r_o;
        let r_i = cavity_input_reflectivity(&laser);
        let loss = threshold_loss(r_i, r_o, laser.eta_g, near.eta)?;
        let g0l = loss
            + 2.0 * loss * targets.p_o
                / (laser.a_b * laser.i_s * (1.0 - r_o) * near.segments.go);
        let eta_e = g0l * laser.a_g * laser.i_s / laser.p_i;
        if !(eta_e > 0.0 && eta_e <= 1.0) {
            continue;
        }
        laser.eta_e = eta_e;
        let mut residuals = Vec::with_capacity(targets.doubled.len());
        for &(p_i, want) in &targets.doubled {
            let mut l = laser;
            l.p_i = p_i;
            let got = channel_power(&l, &s.shg, far.eta, &far.segments)?
                .doubled
                .p_o_2v;
            if got <= 0.0 {
                residuals.clear();
                break;
            }
            residuals.push((want / got).ln());
        }
        if residuals.is_empty() {
            continue;
        }
        let hi = residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = (0.5 * (hi + lo)).exp();
        let misfit = 0.5 * (hi - lo);
        if best.map_or(true, |b| misfit < b.3) {
            best = Some((r_o, eta_e, reference_radius / scale.sqrt(), misfit));
        }
    }
    let (r_o, eta_e, radius, misfit) = best.ok_or_else(|| {
        Error::Domain("no candidate output reflectivity reproduces the targets".into())
    })?;
    s.laser.r_o = r_o;
    s.laser.eta_e = eta_e;
    s.shg.beam_radius = radius;

    let irs = cache.solve(&s.irs_channel(), &s)?;
    let p_d = channel_power(&s.laser, &s.shg, near.eta, &near.segments)?.p_o;
    let p_i = channel_power(&s.laser, &s.shg, irs.eta, &irs.segments)?.p_o;
    s.distance = base.distance;
    Ok(Calibration {
        focal,
        r_o,
        eta_e,
        shg_beam_radius: radius,
        doubled_misfit: misfit.exp_m1(),
        eta_direct: near.e2e,
        eta_irs: irs.e2e,
        p_o_direct: p_d,
        p_o_irs: p_i,
        scenario: s,
    })
}
