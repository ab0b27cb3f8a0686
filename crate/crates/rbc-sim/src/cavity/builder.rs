use crate::error::Result;
use crate::optics::{irs_path_lengths, MisalignmentSpec};

use super::channel::{ChannelPath, ChannelSpec};
use super::operator::{Op, OpticalOperator, Segment, Stage};

/// Lens that, together with the `-2·spacing` leg of [`Op::Retro`], reproduces
/// the paraxial lens–mirror–lens round trip of a retro-reflector.
fn folded_lens(radius: f64, focal: f64, spacing: f64) -> Op {
    let detune = spacing - focal;
    if detune == 0.0 {
        Op::Aperture { radius }
    } else {
        Op::Lens {
            radius,
            focal: spacing * focal / detune,
        }
    }
}

fn outbound(z: f64, m: Option<&MisalignmentSpec>) -> Op {
    match m {
        Some(m) if m.has_rotation() || m.has_translation() => Op::Transit {
            z: z + m.dz,
            shift: (m.dx, m.dy),
            rotation: m.has_rotation().then(|| m.matrix()),
            inbound: false,
        },
        _ => Op::Propagate { z },
    }
}

fn inbound(z: f64, m: Option<&MisalignmentSpec>) -> Op {
    match m {
        Some(m) if m.has_rotation() || m.has_translation() => Op::Transit {
            z: z + m.dz,
            shift: (-m.dx, -m.dy),
            rotation: m.has_rotation().then(|| m.matrix()),
            inbound: true,
        },
        _ => Op::Propagate { z },
    }
}

/// Round trip starting and ending at the gain-medium plane: out to the
/// receiver, back through the gain aperture, to the transmitter reflector
/// and back again.
pub fn build_round_trip(spec: &ChannelSpec) -> Result<OpticalOperator> {
    spec.validate()?;
    let tx = spec.tx;
    let rx = spec.rx;
    let mis = spec.misalignment.as_ref();
    let rx_lens = folded_lens(rx.lens_radius, rx.focal, rx.spacing);
    let tx_lens = folded_lens(tx.lens_radius, tx.focal, tx.spacing);
    let rx_retro = Op::Retro {
        focal: rx.focal,
        spacing: rx.spacing,
        mirror_radius: rx.mirror_radius,
    };
    let tx_retro = Op::Retro {
        focal: tx.focal,
        spacing: tx.spacing,
        mirror_radius: tx.mirror_radius,
    };
    let gain = Op::Aperture {
        radius: tx.gain_radius,
    };

    let mut stages = Vec::new();
    let mut back = vec![rx_retro, rx_lens.clone()];
    match spec.path {
        ChannelPath::Direct { distance } => {
            let mut forward = Vec::new();
            match spec.obstruction {
                Some(o) => {
                    let d1 = o.position * distance;
                    let d2 = distance - d1;
                    let stop = Op::Obstruction {
                        radius: o.radius,
                        depth: o.depth,
                        side: o.side,
                    };
                    forward.extend([Op::Propagate { z: d1 }, stop.clone(), outbound(d2, mis)]);
                    back.extend([inbound(d2, mis), stop, Op::Propagate { z: d1 }]);
                }
                None => {
                    forward.push(outbound(distance, mis));
                    back.push(inbound(distance, mis));
                }
            }
            forward.push(rx_lens);
            stages.push(Stage {
                segment: Segment::GainToOutput,
                ops: forward,
            });
        }
        ChannelPath::Irs { geometry } => {
            let (d_ti, d_ir) = irs_path_lengths(&geometry)?;
            let surface = Op::Scale {
                factor: geometry.amplitude,
            };
            stages.push(Stage {
                segment: Segment::GainToIrs,
                ops: vec![Op::Propagate { z: d_ti }],
            });
            stages.push(Stage {
                segment: Segment::IrsSurface,
                ops: vec![surface.clone()],
            });
            stages.push(Stage {
                segment: Segment::IrsToOutput,
                ops: vec![outbound(d_ir, mis), rx_lens],
            });
            back.extend([inbound(d_ir, mis), surface, Op::Propagate { z: d_ti }]);
        }
    }
    back.push(gain.clone());
    stages.push(Stage {
        segment: Segment::OutputToGain,
        ops: back,
    });
    stages.push(Stage {
        segment: Segment::GainToInput,
        ops: vec![Op::Propagate { z: tx.focal }, tx_lens.clone()],
    });
    stages.push(Stage {
        segment: Segment::InputToGain,
        ops: vec![tx_retro, tx_lens, Op::Propagate { z: tx.focal }, gain],
    });
    Ok(OpticalOperator {
        stages,
        padding: spec.padding,
    })
}
