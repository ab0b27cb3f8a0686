use crate::error::{Error, Result};
use crate::optics::{IrsGeometry, MisalignmentSpec, Side};

/// Transmitter optics: retro-reflector (plane mirror behind a lens) and the
/// gain medium, which sits `focal` in front of the lens.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TxOptics {
    pub mirror_radius: f64,
    pub lens_radius: f64,
    pub gain_radius: f64,
    /// Lens-to-mirror spacing.
    pub spacing: f64,
    pub focal: f64,
}

/// Receiver retro-reflector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RxOptics {
    pub mirror_radius: f64,
    pub lens_radius: f64,
    pub spacing: f64,
    pub focal: f64,
}

/// Opaque edge intruding into the direct path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObstructionSpec {
    pub radius: f64,
    pub depth: f64,
    /// Fractional position along the path, strictly inside (0, 1).
    pub position: f64,
    pub side: Side,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelPath {
    Direct { distance: f64 },
    Irs { geometry: IrsGeometry },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Direct,
    Irs,
}

/// Zero-padding of long free-space legs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Padding {
    pub enabled: bool,
    /// Legs longer than this (metres) are padded.
    pub threshold: f64,
}

impl Default for Padding {
    fn default() -> Self {
        Self {
            enabled: true,
            threshold: 1.0,
        }
    }
}

impl Padding {
    pub fn applies(&self, z: f64) -> bool {
        self.enabled && z.abs() > self.threshold
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub path: ChannelPath,
    pub tx: TxOptics,
    pub rx: RxOptics,
    pub obstruction: Option<ObstructionSpec>,
    pub misalignment: Option<MisalignmentSpec>,
    pub padding: Padding,
}

impl ChannelSpec {
    pub fn kind(&self) -> ChannelKind {
        match self.path {
            ChannelPath::Direct { .. } => ChannelKind::Direct,
            ChannelPath::Irs { .. } => ChannelKind::Irs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("tx mirror radius", self.tx.mirror_radius)?;
        positive("tx lens radius", self.tx.lens_radius)?;
        positive("gain radius", self.tx.gain_radius)?;
        positive("tx spacing", self.tx.spacing)?;
        positive("tx focal length", self.tx.focal)?;
        positive("rx mirror radius", self.rx.mirror_radius)?;
        positive("rx lens radius", self.rx.lens_radius)?;
        positive("rx spacing", self.rx.spacing)?;
        positive("rx focal length", self.rx.focal)?;
        match self.path {
            ChannelPath::Direct { distance } => positive("distance", distance)?,
            ChannelPath::Irs { geometry } => {
                geometry.validate()?;
                if self.obstruction.is_some() {
                    return Err(Error::Config(
                        "an obstruction sits on the direct path; the IRS channel has none".into(),
                    ));
                }
            }
        }
        if let Some(o) = &self.obstruction {
            crate::optics::check_obstruction(o.radius, o.depth)?;
            if !(o.position > 0.0 && o.position < 1.0) {
                return Err(Error::Config(format!(
                    "obstruction position {} must lie strictly inside (0, 1)",
                    o.position
                )));
            }
        }
        if let Some(m) = &self.misalignment {
            m.validate()?;
        }
        Ok(())
    }
}
