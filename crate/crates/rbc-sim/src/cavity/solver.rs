use crate::error::{Error, Result};
use crate::grid::{ComplexField, C64};

use super::builder::build_round_trip;
use super::channel::ChannelSpec;
use super::operator::{CompiledOperator, OpticalOperator, Segment};

/// Consecutive passes that must satisfy the tolerance.
pub const STABLE_PASSES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_round_trips: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_round_trips: 1000,
        }
    }
}

/// One-way power efficiencies of the round trip. The IRS entries are set
/// only for IRS chains, in which case `go = gr · irs · ro`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SegmentEfficiencies {
    pub ig: f64,
    pub go: f64,
    pub og: f64,
    pub gi: f64,
    pub gr: Option<f64>,
    pub irs: Option<f64>,
    pub ro: Option<f64>,
}

impl SegmentEfficiencies {
    /// Round-trip power efficiency `ig · go · og · gi`.
    pub fn round_trip(&self) -> f64 {
        self.ig * self.go * self.og * self.gi
    }

    fn from_ratios(ratios: &[(Segment, f64)]) -> Self {
        let mut e = SegmentEfficiencies::default();
        let mut irs_go = 1.0;
        let mut is_irs = false;
        for (seg, r) in ratios {
            match seg {
                Segment::GainToOutput => e.go = *r,
                Segment::GainToIrs => {
                    e.gr = Some(*r);
                    irs_go *= r;
                    is_irs = true;
                }
                Segment::IrsSurface => {
                    e.irs = Some(*r);
                    irs_go *= r;
                }
                Segment::IrsToOutput => {
                    e.ro = Some(*r);
                    irs_go *= r;
                }
                Segment::OutputToGain => e.og = *r,
                Segment::GainToInput => e.gi = *r,
                Segment::InputToGain => e.ig = *r,
            }
        }
        if is_irs {
            e.go = irs_go;
        }
        e
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateResult {
    /// Field at the gain-medium plane, normalised to unit L1 norm.
    pub mode: ComplexField,
    /// Transfer factor: L1 norm ratio with the phase of the overlap.
    pub rho: C64,
    pub delta: f64,
    pub eta: f64,
    pub round_trips: usize,
    pub converged: bool,
    /// `|rho|` after every pass.
    pub rho_trace: Vec<f64>,
    pub segments: SegmentEfficiencies,
    /// Round-trip power ratio of the final pass.
    pub power_ratio: f64,
}

impl SteadyStateResult {
    /// End-to-end efficiency, the square root of the round-trip efficiency.
    pub fn e2e_efficiency(&self) -> f64 {
        self.eta.sqrt()
    }

    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                round_trips: self.round_trips,
                last_rho: self.rho.norm(),
            })
        }
    }
}

/// Seed for the power iteration: uniform amplitude over the gain aperture
/// with a small seeded random phase.
pub fn seed_field(
    spec: crate::grid::GridSpec,
    wavelength: f64,
    gain_radius: f64,
    seed: u64,
) -> Result<ComplexField> {
    crate::grid::make_field(
        spec,
        wavelength,
        crate::grid::Profile::SeededPhaseDisc {
            radius: gain_radius,
            seed,
        },
    )
}

/// Power iteration to the self-reproducing mode.
pub fn solve_steady_state(
    op: &OpticalOperator,
    seed_field: &ComplexField,
    tol: f64,
    max_round_trips: usize,
) -> Result<SteadyStateResult> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    if max_round_trips < 10 {
        return Err(Error::Config(format!(
            "max_round_trips must be at least 10, got {max_round_trips}"
        )));
    }
    let compiled = op.compile(seed_field.spec(), seed_field.wavelength());
    iterate(&compiled, seed_field, tol, max_round_trips)
}

fn l1(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).sum()
}

fn iterate(
    compiled: &CompiledOperator,
    seed: &ComplexField,
    tol: f64,
    max_round_trips: usize,
) -> Result<SteadyStateResult> {
    let spec = seed.spec();
    let lam = seed.wavelength();
    let mut u: Vec<C64> = seed.values().to_vec();
    let n0 = l1(&u);
    if n0 == 0.0 {
        return Err(Error::DegenerateMode("seed field is identically zero".into()));
    }
    u.iter_mut().for_each(|c| *c /= n0);

    let mut trace: Vec<f64> = Vec::new();
    let mut rho = C64::new(0.0, 0.0);
    let mut power_ratio = 0.0;
    let mut stable = 0;
    let mut converged = false;
    let mut collapsed = false;
    for _ in 0..max_round_trips {
        let mut next = u.clone();
        compiled.apply(&mut next);
        let before = l1(&u);
        let after = l1(&next);
        let overlap: C64 = u.iter().zip(&next).map(|(a, b)| a.conj() * b).sum();
        let p_before: f64 = u.iter().map(|c| c.norm_sqr()).sum();
        let p_after: f64 = next.iter().map(|c| c.norm_sqr()).sum();
        power_ratio = p_after / p_before;
        let mag = after / before;
        rho = if overlap.norm() > 0.0 {
            overlap / overlap.norm() * mag
        } else {
            C64::new(mag, 0.0)
        };
        if let Some(prev) = trace.last() {
            if (mag - prev).abs() < tol {
                stable += 1;
            } else {
                stable = 0;
            }
        }
        trace.push(mag);
        if after == 0.0 {
            collapsed = true;
            converged = true;
            u = next;
            break;
        }
        next.iter_mut().for_each(|c| *c /= after);
        u = next;
        if stable >= STABLE_PASSES {
            converged = true;
            break;
        }
    }

    let mode = ComplexField::from_values(spec, lam, u)?;
    let segments = if collapsed {
        SegmentEfficiencies::default()
    } else {
        let mut probe = mode.values().to_vec();
        SegmentEfficiencies::from_ratios(&compiled.stage_ratios(&mut probe))
    };
    let mag = rho.norm();
    Ok(SteadyStateResult {
        mode,
        rho,
        delta: 1.0 - mag * mag,
        eta: mag * mag,
        round_trips: trace.len(),
        converged,
        rho_trace: trace,
        segments,
        power_ratio,
    })
}

/// Power ratios of each one-way segment of the channel for the given mode.
pub fn segment_efficiencies(spec: &ChannelSpec, mode: &ComplexField) -> Result<SegmentEfficiencies> {
    let op = build_round_trip(spec)?;
    segment_efficiencies_of(&op, mode)
}

pub fn segment_efficiencies_of(op: &OpticalOperator, mode: &ComplexField) -> Result<SegmentEfficiencies> {
    if mode.values().iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::DegenerateMode("mode carries no power".into()));
    }
    let compiled = op.compile(mode.spec(), mode.wavelength());
    let mut v = mode.values().to_vec();
    Ok(SegmentEfficiencies::from_ratios(&compiled.stage_ratios(&mut v)))
}

/// Builds the channel, seeds it and solves.
pub fn solve_channel(
    spec: &ChannelSpec,
    grid: crate::grid::GridSpec,
    wavelength: f64,
    seed: u64,
    options: SolverOptions,
) -> Result<SteadyStateResult> {
    let op = build_round_trip(spec)?;
    if let Some(m) = &spec.misalignment {
        crate::optics::check_shift(grid, m.dx, m.dy)?;
    }
    let seed = seed_field(grid, wavelength, spec.tx.gain_radius, seed)?;
    solve_steady_state(&op, &seed, options.tol, options.max_round_trips)
}
