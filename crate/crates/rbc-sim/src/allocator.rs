//! Choice of the split ratio between the direct and the IRS channel.

use crate::cavity::SegmentEfficiencies;
use crate::error::{Error, Result};
use crate::power::{split_powers, LaserParams};

/// Endpoint values closer than this are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_STEP: f64 = 0.01;

/// Quantities shared by both channels plus each channel's solved
/// efficiencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AllocationInput {
    pub p_t_2v: f64,
    pub eta_ig: f64,
    pub direct: Option<SegmentEfficiencies>,
    pub irs: Option<SegmentEfficiencies>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AllocationResult {
    pub gamma_opt: f64,
    pub p_oc_opt: f64,
    pub p_oc_direct_only: f64,
    pub p_oc_irs_only: f64,
    /// Answer of the direct endpoint comparison.
    pub closed_form_gamma: f64,
    pub trace: Vec<(f64, f64)>,
}

/// Evaluates both endpoints, then scans `gamma` from 0 to 1 and keeps the
/// best value. Ties go to `gamma = 1`.
pub fn optimize_gamma(input: &AllocationInput, laser: &LaserParams, step: f64) -> Result<AllocationResult> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::Config(format!("gamma step {step} outside (0, 0.5]")));
    }
    let direct = input
        .direct
        .ok_or_else(|| Error::State("direct channel has not been solved".into()))?;
    let irs = input
        .irs
        .ok_or_else(|| Error::State("IRS channel has not been solved".into()))?;
    let (gr, s, ro) = match (irs.gr, irs.irs, irs.ro) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => {
            return Err(Error::State(
                "IRS efficiencies are missing their per-leg split".into(),
            ))
        }
    };
    let total = |gamma: f64| {
        let (d, i) = split_powers(input.p_t_2v, gamma, input.eta_ig, direct.go, gr, s, ro, laser);
        d + i
    };

    let p_d = total(1.0);
    let p_i = total(0.0);
    let mut trace = vec![(1.0, p_d), (0.0, p_i)];

    let steps = (1.0 / step).round() as usize;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..=steps {
        let gamma = if k == steps { 1.0 } else { (k as f64 * step).min(1.0) };
        let p = total(gamma);
        trace.push((gamma, p));
        if p >= best.1 {
            best = (gamma, p);
        }
        if gamma >= 1.0 {
            break;
        }
    }
    if (p_d - best.1).abs() <= TIE_TOLERANCE * best.1.abs().max(1.0) {
        best = (1.0, p_d.max(best.1));
    }
    let closed_form_gamma = if p_d + TIE_TOLERANCE * p_d.abs().max(1.0) >= p_i {
        1.0
    } else {
        0.0
    };
    Ok(AllocationResult {
        gamma_opt: best.0,
        p_oc_opt: best.1,
        p_oc_direct_only: p_d,
        p_oc_irs_only: p_i,
        closed_form_gamma,
        trace,
    })
}
