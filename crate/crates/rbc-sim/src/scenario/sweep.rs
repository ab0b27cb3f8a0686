//! Single-point evaluation and one-dimensional parameter sweeps.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Deserialize;

use crate::allocator::{optimize_gamma, AllocationInput};
use crate::cavity::{solve_channel, ChannelSpec, ObstructionSpec, SegmentEfficiencies};
use crate::error::{Error, Result, ScenarioError};
use crate::metrics::{snr, spectral_efficiency};
use crate::optics::{Axis, MisalignmentSpec, Side};
use crate::power::{channel_power, split_powers, ChannelPower};

use super::units::{parse_quantity, Angle, Dimension, Length, Power, Ratio};
use super::{decode, EvalMode, Scenario};

/// The parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    /// Tx-Rx distance.
    Z,
    /// Obstruction depth.
    D,
    /// Lateral receiver offset along x.
    Dx,
    /// Receiver rotation about y.
    ThetaY,
    /// Pump power.
    PumpPower,
    /// Doubling-crystal thickness.
    CrystalLength,
    /// Split ratio.
    Gamma,
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "z" => Ok(Self::Z),
            "d" => Ok(Self::D),
            "dx" | "Δx" => Ok(Self::Dx),
            "theta_y" | "θ_y" => Ok(Self::ThetaY),
            "P_i" => Ok(Self::PumpPower),
            "l_s" => Ok(Self::CrystalLength),
            "gamma" | "γ" => Ok(Self::Gamma),
            other => Err(format!(
                "unknown sweep variable `{other}` (expected z, d, dx, theta_y, P_i, l_s or gamma)"
            )),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Z => "z",
            Self::D => "d",
            Self::Dx => "dx",
            Self::ThetaY => "theta_y",
            Self::PumpPower => "P_i",
            Self::CrystalLength => "l_s",
            Self::Gamma => "gamma",
        })
    }
}

impl SweepVariable {
    /// Axis label with the unit used for display.
    pub fn label(self) -> &'static str {
        match self {
            Self::Z => "z (m)",
            Self::D => "d (m)",
            Self::Dx => "dx (m)",
            Self::ThetaY => "theta_y (rad)",
            Self::PumpPower => "P_i (W)",
            Self::CrystalLength => "l_s (m)",
            Self::Gamma => "gamma",
        }
    }

    fn parse_value(self, text: &str) -> std::result::Result<f64, String> {
        match self {
            Self::Z | Self::D | Self::Dx | Self::CrystalLength => parse_quantity::<Length>(text),
            Self::ThetaY => parse_quantity::<Angle>(text),
            Self::PumpPower => parse_quantity::<Power>(text),
            Self::Gamma => parse_quantity::<Ratio>(text),
        }
    }

    fn accepts_bare(self) -> bool {
        matches!(self, Self::Gamma) && Ratio::BARE_NUMBER
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub channel: EvalMode,
    /// Columns to plot; empty means every numeric column.
    pub columns: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: String,
    start: toml::Value,
    stop: toml::Value,
    count: usize,
    channel: Option<String>,
    #[serde(default)]
    columns: Vec<String>,
}

pub fn load_sweep(path: impl AsRef<Path>) -> Result<SweepSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sweep(&text, &path.display().to_string())
}

pub fn parse_sweep(text: &str, origin: &str) -> Result<SweepSpec> {
    let raw: RawSweep = decode(text, origin)?;
    let range = |key: &str, reason: String| {
        Error::Scenario(ScenarioError::Range {
            origin: origin.to_string(),
            key: key.to_string(),
            reason,
        })
    };
    let variable: SweepVariable = raw.variable.parse().map_err(|e| range("variable", e))?;
    let value = |key: &str, v: &toml::Value| -> Result<f64> {
        let parsed = match v {
            toml::Value::String(s) => variable.parse_value(s),
            toml::Value::Float(x) if variable.accepts_bare() => Ok(*x),
            toml::Value::Integer(x) if variable.accepts_bare() => Ok(*x as f64),
            other => Err(format!("expected a quantity string such as \"5 m\", got {other}")),
        };
        parsed.map_err(|reason| {
            Error::Scenario(ScenarioError::Syntax {
                origin: origin.to_string(),
                message: format!("`{key}`: {reason}"),
            })
        })
    };
    let start = value("start", &raw.start)?;
    let stop = value("stop", &raw.stop)?;
    if raw.count < 2 {
        return Err(range("count", format!("{} points; a sweep needs at least 2", raw.count)));
    }
    let channel = match &raw.channel {
        Some(c) => c.parse().map_err(|e| range("channel", e))?,
        None => EvalMode::default(),
    };
    for c in &raw.columns {
        if !super::COLUMNS[1..super::COLUMNS.len() - 1].contains(&c.as_str()) {
            return Err(range("columns", format!("`{c}` is not a numeric output column")));
        }
    }
    let spec = SweepSpec {
        variable,
        start,
        stop,
        count: raw.count,
        channel,
        columns: raw.columns,
    };
    spec.check_domain(origin)?;
    Ok(spec)
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last
                }
            })
            .collect()
    }

    /// Scenario-independent bounds.
    fn check_domain(&self, origin: &str) -> Result<()> {
        let (lo, hi) = (self.start.min(self.stop), self.start.max(self.stop));
        let ok = match self.variable {
            SweepVariable::Z | SweepVariable::CrystalLength => lo > 0.0,
            SweepVariable::D | SweepVariable::PumpPower => lo >= 0.0,
            SweepVariable::Dx => true,
            SweepVariable::ThetaY => hi.abs().max(lo.abs()) < std::f64::consts::FRAC_PI_2,
            SweepVariable::Gamma => lo >= 0.0 && hi <= 1.0,
        };
        if !(ok && lo.is_finite() && hi.is_finite()) {
            let what = match self.variable {
                SweepVariable::Z | SweepVariable::CrystalLength => "must be positive",
                SweepVariable::D | SweepVariable::PumpPower => "must be non-negative",
                SweepVariable::Dx => "must be finite",
                SweepVariable::ThetaY => "must stay below 90 degrees in magnitude",
                SweepVariable::Gamma => "must lie in [0, 1]",
            };
            return Err(Error::Scenario(ScenarioError::Range {
                origin: origin.to_string(),
                key: self.variable.to_string(),
                reason: format!("range [{lo}, {hi}] {what}"),
            }));
        }
        Ok(())
    }

    /// Bounds that depend on the scenario.
    pub fn check_against(&self, s: &Scenario) -> Result<()> {
        self.check_domain(&s.name)?;
        let hi = self.start.abs().max(self.stop.abs());
        let range = |reason: String| {
            Error::Scenario(ScenarioError::Range {
                origin: s.name.clone(),
                key: self.variable.to_string(),
                reason,
            })
        };
        match self.variable {
            SweepVariable::D => {
                let r_b = s.blocking_radius();
                if hi > r_b {
                    return Err(range(format!(
                        "depth up to {} mm exceeds r_B = {} mm; d must lie in [0, r_B]",
                        hi * 1e3,
                        r_b * 1e3
                    )));
                }
            }
            SweepVariable::Dx => {
                let limit = s.grid.half_width() / 2.0;
                if hi >= limit {
                    return Err(range(format!(
                        "offsets up to {hi} m reach half the {} m half-window",
                        s.grid.half_width()
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The scenario with the swept parameter set to `v`.
    pub fn apply(&self, base: &Scenario, v: f64) -> Scenario {
        let mut s = base.clone();
        match self.variable {
            SweepVariable::Z => s.distance = v,
            SweepVariable::D => {
                let o = s.obstruction.get_or_insert(ObstructionSpec {
                    radius: base.rx.mirror_radius,
                    depth: 0.0,
                    position: super::defaults::OBSTRUCTION_POSITION,
                    side: Side::default(),
                });
                o.depth = v;
            }
            SweepVariable::Dx => {
                s.misalignment.get_or_insert_with(MisalignmentSpec::default).dx = v;
            }
            SweepVariable::ThetaY => {
                let m = s.misalignment.get_or_insert_with(MisalignmentSpec::default);
                match m.rotation.iter_mut().find(|(a, _)| *a == Axis::Y) {
                    Some(entry) => entry.1 = v,
                    None => m.rotation.push((Axis::Y, v)),
                }
            }
            SweepVariable::PumpPower => s.laser.p_i = v,
            SweepVariable::CrystalLength => s.shg.l_s = v,
            SweepVariable::Gamma => s.gamma = v,
        }
        s
    }
}

/// Summary of one solved channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSolution {
    /// End-to-end efficiency `|ρ|`.
    pub e2e: f64,
    /// Round-trip efficiency `|ρ|²`.
    pub eta: f64,
    pub converged: bool,
    pub round_trips: usize,
    pub segments: SegmentEfficiencies,
}

/// Memo of steady states keyed by everything that shapes the cavity.
#[derive(Default)]
pub struct SolveCache {
    map: Mutex<HashMap<String, Arc<OnceLock<Option<ChannelSolution>>>>>,
}

impl SolveCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn solve(&self, spec: &ChannelSpec, s: &Scenario) -> Result<ChannelSolution> {
        let key = format!(
            "{spec:?}|{:?}|{:e}|{}|{:?}",
            s.grid, s.wavelength, s.seed, s.solver
        );
        let cell = {
            let mut map = self
                .map
                .lock()
                .map_err(|_| Error::State("solve cache poisoned".into()))?;
            map.entry(key).or_default().clone()
        };
        if let Some(Some(hit)) = cell.get() {
            return Ok(*hit);
        }
        let mut failure = None;
        let stored = cell.get_or_init(|| match solve_uncached(spec, s) {
            Ok(sol) => Some(sol),
            Err(e) => {
                failure = Some(e);
                None
            }
        });
        match (stored, failure) {
            (Some(sol), _) => Ok(*sol),
            (None, Some(e)) => Err(e),
            (None, None) => solve_uncached(spec, s),
        }
    }
}

fn solve_uncached(spec: &ChannelSpec, s: &Scenario) -> Result<ChannelSolution> {
    let r = solve_channel(spec, s.grid, s.wavelength, s.seed, s.solver)?;
    Ok(ChannelSolution {
        e2e: r.rho.norm(),
        eta: r.eta,
        converged: r.converged,
        round_trips: r.round_trips,
        segments: r.segments,
    })
}

/// One output line. `None` marks a quantity the channel mode does not
/// produce.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub eta_direct: Option<f64>,
    pub eta_irs: Option<f64>,
    pub p_o: Option<f64>,
    pub p_o_2v: Option<f64>,
    pub p_oc_d: Option<f64>,
    pub p_oc_i: Option<f64>,
    pub gamma_opt: Option<f64>,
    pub p_oc: Option<f64>,
    pub snr_db: Option<f64>,
    pub se_bps_hz: Option<f64>,
    pub status: String,
}

impl Row {
    fn failed(sweep_value: f64, e: &Error) -> Self {
        Row {
            sweep_value,
            eta_direct: None,
            eta_irs: None,
            p_o: None,
            p_o_2v: None,
            p_oc_d: None,
            p_oc_i: None,
            gamma_opt: None,
            p_oc: None,
            snr_db: None,
            se_bps_hz: None,
            status: format!("error: {e}"),
        }
    }

    /// Value of a numeric column by name.
    pub fn get(&self, column: &str) -> Option<f64> {
        match column {
            "sweep_value" => Some(self.sweep_value),
            "eta_direct" => self.eta_direct,
            "eta_irs" => self.eta_irs,
            "P_o" => self.p_o,
            "P_o_2v" => self.p_o_2v,
            "P_oc_d" => self.p_oc_d,
            "P_oc_i" => self.p_oc_i,
            "gamma_opt" => self.gamma_opt,
            "P_oc" => self.p_oc,
            "SNR_dB" => self.snr_db,
            "SE_bps_hz" => self.se_bps_hz,
            _ => None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Solves the channels `mode` needs and evaluates the power budget and
/// link metrics.
pub fn evaluate(s: &Scenario, mode: EvalMode, cache: &SolveCache) -> Result<Row> {
    let direct = match mode {
        EvalMode::Irs => None,
        _ => Some(cache.solve(&s.direct_channel(), s)?),
    };
    let irs = match mode {
        EvalMode::Direct => None,
        _ => Some(cache.solve(&s.irs_channel(), s)?),
    };
    let mut pending = Vec::new();
    if direct.is_some_and(|d| !d.converged) {
        pending.push("direct");
    }
    if irs.is_some_and(|i| !i.converged) {
        pending.push("irs");
    }

    let power = |c: &ChannelSolution| channel_power(&s.laser, &s.shg, c.eta, &c.segments);
    let pw_d: Option<ChannelPower> = direct.as_ref().map(power).transpose()?;
    let pw_i: Option<ChannelPower> = irs.as_ref().map(power).transpose()?;

    let (fund, fund_seg) = match (&pw_d, &pw_i, &direct, &irs) {
        (Some(a), Some(b), Some(da), Some(db)) => {
            if b.p_o > a.p_o {
                (*b, db.segments)
            } else {
                (*a, da.segments)
            }
        }
        (Some(a), None, Some(da), _) => (*a, da.segments),
        (None, Some(b), _, Some(db)) => (*b, db.segments),
        _ => return Err(Error::State("no channel was solved".into())),
    };
    let p_t_2v = fund.doubled.p_t_2v;
    let eta_ig = fund_seg.ig;
    let dseg = direct.map(|d| d.segments).unwrap_or_default();
    let iseg = irs.map(|i| i.segments).unwrap_or_default();
    let legs = (
        iseg.gr.unwrap_or(0.0),
        iseg.irs.unwrap_or(0.0),
        iseg.ro.unwrap_or(0.0),
    );
    let split = |gamma: f64| {
        split_powers(p_t_2v, gamma, eta_ig, dseg.go, legs.0, legs.1, legs.2, &s.laser)
    };

    let (p_oc_d, p_oc_i, gamma_col) = match mode {
        EvalMode::Direct => (Some(split(1.0).0), None, None),
        EvalMode::Irs => (None, Some(split(0.0).1), None),
        EvalMode::Both => {
            let (d, i) = split(s.gamma);
            (Some(d), Some(i), Some(s.gamma))
        }
        EvalMode::Optimized => {
            let input = AllocationInput {
                p_t_2v,
                eta_ig,
                direct: Some(dseg),
                irs: Some(iseg),
            };
            let a = optimize_gamma(&input, &s.laser, s.gamma_step)?;
            let (d, i) = split(a.gamma_opt);
            (Some(d), Some(i), Some(a.gamma_opt))
        }
    };
    let p_oc = p_oc_d.unwrap_or(0.0) + p_oc_i.unwrap_or(0.0);
    let link = snr(p_oc, &s.detector);

    Ok(Row {
        sweep_value: f64::NAN,
        eta_direct: direct.map(|d| d.e2e),
        eta_irs: irs.map(|i| i.e2e),
        p_o: Some(fund.p_o),
        p_o_2v: Some(fund.doubled.p_o_2v),
        p_oc_d,
        p_oc_i,
        gamma_opt: gamma_col,
        p_oc: Some(p_oc),
        snr_db: Some(link.db),
        se_bps_hz: Some(spectral_efficiency(link.linear)),
        status: if pending.is_empty() {
            "ok".into()
        } else {
            format!("not converged: {}", pending.join("+"))
        },
    })
}

/// Runs every sweep point with a shared cache.
pub fn run_sweep(s: &Scenario, sweep: &SweepSpec) -> Result<Vec<Row>> {
    let cache = SolveCache::new();
    run_sweep_with(s, sweep, Some(&cache))
}

/// Runs a sweep. Without a cache every point solves its own channels.
/// Rows come back in sweep order; a failing point is reported in its row.
pub fn run_sweep_with(s: &Scenario, sweep: &SweepSpec, cache: Option<&SolveCache>) -> Result<Vec<Row>> {
    sweep.check_against(s)?;
    let values = sweep.values();
    let rows = values
        .par_iter()
        .map(|&v| {
            let point = sweep.apply(s, v);
            let local;
            let cache = match cache {
                Some(c) => c,
                None => {
                    local = SolveCache::new();
                    &local
                }
            };
            let evaluated = point
                .validate(&s.name)
                .and_then(|_| evaluate(&point, sweep.channel, cache));
            match evaluated {
                Ok(mut row) => {
                    row.sweep_value = v;
                    row
                }
                Err(e) => Row::failed(v, &e),
            }
        })
        .collect();
    Ok(rows)
}
