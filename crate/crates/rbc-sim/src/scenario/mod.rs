//! Scenario files: a TOML layout with explicit units, converted to SI and
//! validated into a [`Scenario`].
//!
//! Quantities are strings such as `"5 m"` or `"1260 W/cm^2"`; ratios may be
//! bare numbers. Only `wavelength`, `channel.distance_z`, the transmitter
//! radii and spacing and `laser.P_i` are required. Everything else falls back
//! to [`defaults`].

mod output;
mod schema;
mod sweep;
pub mod units;

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::cavity::{
    ChannelPath, ChannelSpec, ObstructionSpec, Padding, RxOptics, SolverOptions, TxOptics,
};
use crate::error::{Error, Result, ScenarioError};
use crate::grid::GridSpec;
use crate::metrics::{DetectorParams, BOLTZMANN, ELECTRON_CHARGE};
use crate::optics::{Axis, IrsGeometry, MisalignmentSpec, Side};
use crate::power::{LaserParams, ShgCrystal, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};

pub use output::{parse_csv, plot_svg, render_csv, write_outputs, OutputFormat, COLUMNS};
pub use sweep::{
    evaluate, load_sweep, parse_sweep, run_sweep, run_sweep_with, ChannelSolution, Row,
    SolveCache, SweepSpec, SweepVariable,
};

/// Values used when a key is absent.
pub mod defaults {
    pub const SEED: u64 = 7;
    pub const GRID_N: usize = 512;
    pub const GRID_HALF_WIDTH: f64 = 10e-3;
    /// Lens focal length, fitted to the aligned 5 m direct-link efficiency.
    pub const FOCAL: f64 = 0.049964764;
    pub const GAMMA: f64 = 1.0;
    pub const OBSTRUCTION_POSITION: f64 = 0.5;

    pub const ETA_E: f64 = 0.69615611;
    pub const I_S: f64 = 1260e4;
    pub const R_I: f64 = 0.95;
    pub const R_I_V: f64 = 0.05;
    pub const R_I_2V: f64 = 0.5;
    pub const R_O: f64 = 0.83;
    pub const R_O_2V: f64 = 0.05;
    pub const R_E: f64 = 0.95;
    pub const T_S: f64 = 0.99;
    pub const ETA_G: f64 = 1.0;

    pub const C_N: f64 = 4.7e-12;
    pub const L_S: f64 = 2e-3;
    pub const N_IDX: f64 = 2.23;
    /// Beam radius in the doubling crystal, fitted to the doubled-power curve.
    pub const SHG_BEAM_RADIUS: f64 = 12.53578e-6;

    pub const ETA_C: f64 = 0.6;
    pub const I_K: f64 = 5100e-6;
    pub const B: f64 = 811.7e6;
    pub const L_R: f64 = 5100e3;
    pub const T: f64 = 300.0;
}

/// Which channels a run evaluates and how the doubled beam is split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum EvalMode {
    Direct,
    Irs,
    /// Both channels at the scenario's fixed split ratio.
    Both,
    /// Both channels with the split ratio chosen by the allocator.
    #[default]
    Optimized,
}

impl FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "direct" => Ok(EvalMode::Direct),
            "irs" => Ok(EvalMode::Irs),
            "both" => Ok(EvalMode::Both),
            "optimized" => Ok(EvalMode::Optimized),
            other => Err(format!(
                "unknown channel mode `{other}` (expected direct, irs, both or optimized)"
            )),
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMode::Direct => "direct",
            EvalMode::Irs => "irs",
            EvalMode::Both => "both",
            EvalMode::Optimized => "optimized",
        })
    }
}

/// IRS placement as written in the file; unset offsets follow the distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IrsPlacement {
    pub theta_i: f64,
    pub phi_i: f64,
    pub theta_r: f64,
    pub phi_r: f64,
    pub dx_i: Option<f64>,
    pub dx_r: Option<f64>,
    pub amplitude: f64,
}

impl Default for IrsPlacement {
    fn default() -> Self {
        let g = IrsGeometry::folded(1.0);
        Self {
            theta_i: g.theta_i,
            phi_i: g.phi_i,
            theta_r: g.theta_r,
            phi_r: g.phi_r,
            dx_i: None,
            dx_r: None,
            amplitude: g.amplitude,
        }
    }
}

impl IrsPlacement {
    pub fn geometry(&self, distance: f64) -> IrsGeometry {
        IrsGeometry {
            theta_i: self.theta_i,
            phi_i: self.phi_i,
            theta_r: self.theta_r,
            phi_r: self.phi_r,
            dx_i: self.dx_i.unwrap_or(distance / 2.0),
            dx_r: self.dx_r.unwrap_or(distance / 2.0),
            amplitude: self.amplitude,
        }
    }
}

/// A fully resolved simulation setup in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub wavelength: f64,
    pub seed: u64,
    pub grid: GridSpec,
    pub solver: SolverOptions,
    pub padding: Padding,
    pub mode: EvalMode,
    pub distance: f64,
    pub gamma: f64,
    pub gamma_step: f64,
    pub tx: TxOptics,
    pub rx: RxOptics,
    pub obstruction: Option<ObstructionSpec>,
    pub misalignment: Option<MisalignmentSpec>,
    pub irs: IrsPlacement,
    pub laser: LaserParams,
    pub shg: ShgCrystal,
    pub detector: DetectorParams,
}

impl Scenario {
    pub fn direct_channel(&self) -> ChannelSpec {
        ChannelSpec {
            path: ChannelPath::Direct {
                distance: self.distance,
            },
            tx: self.tx,
            rx: self.rx,
            obstruction: self.obstruction,
            misalignment: self.misalignment.clone(),
            padding: self.padding,
        }
    }

    /// The IRS channel never crosses the direct-path obstruction.
    pub fn irs_channel(&self) -> ChannelSpec {
        ChannelSpec {
            path: ChannelPath::Irs {
                geometry: self.irs_geometry(),
            },
            tx: self.tx,
            rx: self.rx,
            obstruction: None,
            misalignment: self.misalignment.clone(),
            padding: self.padding,
        }
    }

    pub fn irs_geometry(&self) -> IrsGeometry {
        self.irs.geometry(self.distance)
    }

    /// Obstruction radius used when the file gives only a depth.
    pub fn blocking_radius(&self) -> f64 {
        self.obstruction
            .map(|o| o.radius)
            .unwrap_or(self.rx.mirror_radius)
    }

    pub fn with_grid_n(mut self, n: usize) -> Result<Self> {
        self.grid = GridSpec::new(n, self.grid.half_width())?;
        Ok(self)
    }

    /// Checks every cross-field constraint. `origin` labels diagnostics.
    pub fn validate(&self, origin: &str) -> Result<()> {
        let range = |key: &str, reason: String| {
            Error::Scenario(ScenarioError::Range {
                origin: origin.to_string(),
                key: key.to_string(),
                reason,
            })
        };
        if !(self.wavelength > 0.0) {
            return Err(range("wavelength", "must be positive".into()));
        }
        if !(self.distance > 0.0) {
            return Err(range("channel.distance_z", "must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(range("channel.gamma", format!("{} is outside [0, 1]", self.gamma)));
        }
        if !(self.gamma_step > 0.0 && self.gamma_step <= 0.5) {
            return Err(range(
                "channel.gamma_step",
                format!("{} is outside (0, 0.5]", self.gamma_step),
            ));
        }
        if !(self.solver.tol > 0.0) {
            return Err(range("solver.tol", "must be positive".into()));
        }
        if self.solver.max_round_trips < 10 {
            return Err(range("solver.max_round_trips", "must be at least 10".into()));
        }
        let hw = self.grid.half_width();
        for (key, r) in [
            ("tx.mirror_radius", self.tx.mirror_radius),
            ("tx.lens_radius", self.tx.lens_radius),
            ("tx.gain_radius", self.tx.gain_radius),
            ("rx.mirror_radius", self.rx.mirror_radius),
            ("rx.lens_radius", self.rx.lens_radius),
        ] {
            if !(r > 0.0 && r <= hw) {
                return Err(range(
                    key,
                    format!("{r} m must be positive and fit the {hw} m half-window"),
                ));
            }
        }
        if let Some(o) = &self.obstruction {
            if !(0.0..=o.radius).contains(&o.depth) {
                return Err(range(
                    "obstruction.depth",
                    format!(
                        "depth {} mm must lie in [0, r_B] with r_B = {} mm",
                        o.depth * 1e3,
                        o.radius * 1e3
                    ),
                ));
            }
            if !(o.position > 0.0 && o.position < 1.0) {
                return Err(range(
                    "obstruction.position",
                    format!("{} must lie strictly inside (0, 1)", o.position),
                ));
            }
        }
        if let Some(m) = &self.misalignment {
            for (key, v) in [("misalignment.dx", m.dx), ("misalignment.dy", m.dy)] {
                if v.abs() >= hw / 2.0 {
                    return Err(range(
                        key,
                        format!("|{v}| m must stay below half the {hw} m half-window"),
                    ));
                }
            }
            m.validate()
                .map_err(|e| range("misalignment.rotation", strip(&e)))?;
        }
        if !(self.irs.amplitude > 0.0 && self.irs.amplitude <= 1.0) {
            return Err(range(
                "irs.amplitude",
                format!("{} is outside (0, 1]", self.irs.amplitude),
            ));
        }
        self.irs_geometry()
            .validate()
            .map_err(|e| range("irs", strip(&e)))?;
        self.direct_channel()
            .validate()
            .map_err(|e| range("tx/rx", strip(&e)))?;
        self.laser
            .validate()
            .map_err(|e| range("laser", strip(&e)))?;
        if !(self.laser.a_g > 0.0 && self.laser.i_s > 0.0) {
            return Err(range("laser", "A_g and I_s must be positive".into()));
        }
        self.shg.validate().map_err(|e| range("shg", strip(&e)))?;
        self.detector
            .validate()
            .map_err(|e| range("detector", strip(&e)))?;
        Ok(())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = |v: f64| -> f64 { format!("{v:.9e}").parse().unwrap_or(v) };
        let mm = |v: f64| t(v * 1e3);
        writeln!(f, "scenario        {}", self.name)?;
        writeln!(f, "wavelength      {} nm", t(self.wavelength * 1e9))?;
        writeln!(f, "distance_z      {} m", self.distance)?;
        writeln!(f, "mode            {}", self.mode)?;
        writeln!(
            f,
            "tx              r_M = {} mm, r_L = {} mm, r_G = {} mm, l_c = {} cm, f = {} mm",
            mm(self.tx.mirror_radius),
            mm(self.tx.lens_radius),
            mm(self.tx.gain_radius),
            t(self.tx.spacing * 1e2),
            mm(self.tx.focal)
        )?;
        writeln!(
            f,
            "rx              r_M = {} mm, r_L = {} mm, l_c = {} cm, f = {} mm",
            mm(self.rx.mirror_radius),
            mm(self.rx.lens_radius),
            t(self.rx.spacing * 1e2),
            mm(self.rx.focal)
        )?;
        match &self.obstruction {
            Some(o) => writeln!(
                f,
                "obstruction     d = {} mm, r_B = {} mm, z_o = {}, side {}",
                mm(o.depth),
                mm(o.radius),
                o.position,
                o.side
            )?,
            None => writeln!(f, "obstruction     none")?,
        }
        match &self.misalignment {
            Some(m) => {
                let rot: Vec<String> = m
                    .rotation
                    .iter()
                    .map(|(a, angle)| format!("{a}:{} deg", t(angle.to_degrees())))
                    .collect();
                writeln!(
                    f,
                    "misalignment    dx = {} mm, dy = {} mm, dz = {} mm, rotation [{}]",
                    mm(m.dx),
                    mm(m.dy),
                    mm(m.dz),
                    rot.join(", ")
                )?
            }
            None => writeln!(f, "misalignment    none")?,
        }
        let g = self.irs_geometry();
        writeln!(
            f,
            "irs             theta_i = {} deg, theta_r = {} deg, dx_i = {} m, dx_r = {} m, m = {}",
            t(g.theta_i.to_degrees()),
            t(g.theta_r.to_degrees()),
            g.dx_i,
            g.dx_r,
            g.amplitude
        )?;
        let l = &self.laser;
        writeln!(
            f,
            "laser           P_i = {} W, eta_e = {}, I_s = {} W/cm^2, R_i = {}, R_i_v = {}, R_o = {}",
            l.p_i,
            l.eta_e,
            t(l.i_s * 1e-4),
            l.r_i,
            l.r_i_v,
            l.r_o
        )?;
        writeln!(
            f,
            "shg             C_n = {} pm/V, l_s = {} mm, n = {}, w_b = {} um",
            t(self.shg.c_n * 1e12),
            mm(self.shg.l_s),
            self.shg.n_idx,
            t(self.shg.beam_radius * 1e6)
        )?;
        writeln!(
            f,
            "grid            n = {}, half-width = {} mm, seed = {}",
            self.grid.n(),
            mm(self.grid.half_width()),
            self.seed
        )
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Config(s) | Error::Domain(s) | Error::Geometry(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

/// Parses scenario text; `origin` names the source in diagnostics.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let raw: schema::RawScenario = decode(text, origin)?;
    let scenario = resolve(raw, origin)?;
    scenario.validate(origin)?;
    Ok(scenario)
}

/// Deserializes TOML, sorting failures into missing, unknown and syntax
/// diagnostics with a line and column.
pub(crate) fn decode<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| {
        let located = match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                format!("{origin}:{line}:{col}")
            }
            None => origin.to_string(),
        };
        let message = e.message().to_string();
        let quoted = |prefix: &str| {
            message
                .strip_prefix(prefix)
                .and_then(|rest| rest.split('`').next())
                .map(str::to_string)
        };
        let err = if let Some(key) = quoted("missing field `") {
            ScenarioError::MissingField {
                origin: located,
                key,
            }
        } else if let Some(key) = quoted("unknown field `") {
            ScenarioError::UnknownKey {
                origin: located,
                key,
            }
        } else {
            ScenarioError::Syntax {
                origin: located,
                message: message.trim().to_string(),
            }
        };
        Error::Scenario(err)
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

fn resolve(raw: schema::RawScenario, origin: &str) -> Result<Scenario> {
    let bad = |key: &str, reason: String| {
        Error::Scenario(ScenarioError::Range {
            origin: origin.to_string(),
            key: key.to_string(),
            reason,
        })
    };
    let or = |q: Option<f64>, d: f64| q.unwrap_or(d);

    let wavelength = raw.wavelength.si();
    let grid_raw = raw.grid.as_ref();
    let grid = GridSpec::new(
        grid_raw.and_then(|g| g.n).unwrap_or(defaults::GRID_N),
        grid_raw
            .and_then(|g| g.half_width)
            .map_or(defaults::GRID_HALF_WIDTH, |q| q.si()),
    )
    .map_err(|e| bad("grid", strip(&e)))?;

    let sd = SolverOptions::default();
    let solver = SolverOptions {
        tol: raw.solver.as_ref().and_then(|s| s.tol).unwrap_or(sd.tol),
        max_round_trips: raw
            .solver
            .as_ref()
            .and_then(|s| s.max_round_trips)
            .unwrap_or(sd.max_round_trips),
    };
    let pd = Padding::default();
    let padding = Padding {
        enabled: raw.padding.as_ref().and_then(|p| p.enabled).unwrap_or(pd.enabled),
        threshold: raw
            .padding
            .as_ref()
            .and_then(|p| p.threshold)
            .map_or(pd.threshold, |q| q.si()),
    };

    let ch = &raw.channel;
    let mode = match &ch.mode {
        Some(m) => m.parse().map_err(|e| bad("channel.mode", e))?,
        None => EvalMode::default(),
    };

    let tx = TxOptics {
        mirror_radius: raw.tx.mirror_radius.si(),
        lens_radius: raw.tx.lens_radius.si(),
        gain_radius: raw.tx.gain_radius.si(),
        spacing: raw.tx.spacing.si(),
        focal: raw.tx.focal.map_or(defaults::FOCAL, |q| q.si()),
    };
    let rx_raw = raw.rx.as_ref();
    let rx = RxOptics {
        mirror_radius: rx_raw
            .and_then(|r| r.mirror_radius)
            .map_or(tx.mirror_radius, |q| q.si()),
        lens_radius: rx_raw
            .and_then(|r| r.lens_radius)
            .map_or(tx.lens_radius, |q| q.si()),
        spacing: rx_raw.and_then(|r| r.spacing).map_or(tx.spacing, |q| q.si()),
        focal: rx_raw.and_then(|r| r.focal).map_or(tx.focal, |q| q.si()),
    };

    let obstruction = match &raw.obstruction {
        Some(o) => Some(ObstructionSpec {
            radius: o.radius.map_or(rx.mirror_radius, |q| q.si()),
            depth: o.depth.si(),
            position: o.position.map_or(defaults::OBSTRUCTION_POSITION, |q| q.si()),
            side: match &o.side {
                Some(s) => Side::from_str(s).map_err(|e| bad("obstruction.side", e))?,
                None => Side::default(),
            },
        }),
        None => None,
    };

    let misalignment = match &raw.misalignment {
        Some(m) => {
            let mut rotation = Vec::with_capacity(m.rotation.len());
            for r in &m.rotation {
                let axis =
                    Axis::from_str(&r.axis).map_err(|e| bad("misalignment.rotation.axis", e))?;
                rotation.push((axis, r.angle.si()));
            }
            Some(MisalignmentSpec {
                dx: m.dx.map_or(0.0, |q| q.si()),
                dy: m.dy.map_or(0.0, |q| q.si()),
                dz: m.dz.map_or(0.0, |q| q.si()),
                rotation,
            })
        }
        None => None,
    };

    let id = IrsPlacement::default();
    let irs = match &raw.irs {
        Some(i) => IrsPlacement {
            theta_i: i.theta_i.map_or(id.theta_i, |q| q.si()),
            phi_i: i.phi_i.map_or(id.phi_i, |q| q.si()),
            theta_r: i.theta_r.map_or(id.theta_r, |q| q.si()),
            phi_r: i.phi_r.map_or(id.phi_r, |q| q.si()),
            dx_i: i.dx_i.map(|q| q.si()),
            dx_r: i.dx_r.map(|q| q.si()),
            amplitude: i.amplitude.map_or(id.amplitude, |q| q.si()),
        },
        None => id,
    };

    let l = &raw.laser;
    let a_g = l
        .a_g
        .map_or(PI * tx.gain_radius * tx.gain_radius, |q| q.si());
    let laser = LaserParams {
        p_i: l.p_i.si(),
        eta_e: or(l.eta_e.map(|q| q.si()), defaults::ETA_E),
        a_g,
        a_b: l.a_b.map_or(a_g, |q| q.si()),
        i_s: or(l.i_s.map(|q| q.si()), defaults::I_S),
        r_i: or(l.r_i.map(|q| q.si()), defaults::R_I),
        r_i_v: or(l.r_i_v.map(|q| q.si()), defaults::R_I_V),
        r_i_2v: or(l.r_i_2v.map(|q| q.si()), defaults::R_I_2V),
        r_o: or(l.r_o.map(|q| q.si()), defaults::R_O),
        r_o_2v: or(l.r_o_2v.map(|q| q.si()), defaults::R_O_2V),
        r_e: or(l.r_e.map(|q| q.si()), defaults::R_E),
        t_s: or(l.t_s.map(|q| q.si()), defaults::T_S),
        eta_g: or(l.eta_g.map(|q| q.si()), defaults::ETA_G),
    };

    let s = raw.shg.as_ref();
    let shg = ShgCrystal {
        c_n: s.and_then(|s| s.c_n).map_or(defaults::C_N, |q| q.si()),
        l_s: s.and_then(|s| s.l_s).map_or(defaults::L_S, |q| q.si()),
        n_idx: s.and_then(|s| s.n_idx).map_or(defaults::N_IDX, |q| q.si()),
        epsilon: s
            .and_then(|s| s.epsilon)
            .map_or(VACUUM_PERMITTIVITY, |q| q.si()),
        c: s.and_then(|s| s.c).map_or(SPEED_OF_LIGHT, |q| q.si()),
        beam_radius: s
            .and_then(|s| s.beam_radius)
            .map_or(defaults::SHG_BEAM_RADIUS, |q| q.si()),
        wavelength,
    };

    let d = raw.detector.as_ref();
    let b = d.and_then(|d| d.b).map_or(defaults::B, |q| q.si());
    let detector = DetectorParams {
        eta_c: d.and_then(|d| d.eta_c).map_or(defaults::ETA_C, |q| q.si()),
        i_k: d.and_then(|d| d.i_k).map_or(defaults::I_K, |q| q.si()),
        b,
        l_r: d.and_then(|d| d.l_r).map_or(defaults::L_R, |q| q.si()),
        q: ELECTRON_CHARGE,
        k_b: BOLTZMANN,
        t: d.and_then(|d| d.t).map_or(defaults::T, |q| q.si()),
        b_c: d.and_then(|d| d.b_c).map_or(b, |q| q.si()),
    };

    Ok(Scenario {
        name: raw.name.clone().unwrap_or_else(|| "unnamed".into()),
        wavelength,
        seed: raw.seed.unwrap_or(defaults::SEED),
        grid,
        solver,
        padding,
        mode,
        distance: ch.distance_z.si(),
        gamma: ch.gamma.map_or(defaults::GAMMA, |q| q.si()),
        gamma_step: ch
            .gamma_step
            .map_or(crate::allocator::DEFAULT_STEP, |q| q.si()),
        tx,
        rx,
        obstruction,
        misalignment,
        irs,
        laser,
        shg,
        detector,
    })
}
