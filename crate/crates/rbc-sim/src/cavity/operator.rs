use crate::grid::{sum_sqr, ComplexField, GridSpec, C64};
use crate::optics::{
    disc_mask, filter_in_place, filter_padded_in_place, lens_pupil, mask_in_place,
    multiply_in_place, obstruction_mask, transfer_function, Mat3, RotatedTransit, Side,
};

use super::channel::Padding;

/// Elementary step of a cavity chain.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Propagate {
        z: f64,
    },
    /// Leg ending on (outbound) or starting from (inbound) a displaced
    /// receiver. The inbound shift is already negated by the builder.
    Transit {
        z: f64,
        shift: (f64, f64),
        rotation: Option<Mat3>,
        inbound: bool,
    },
    Aperture {
        radius: f64,
    },
    Lens {
        radius: f64,
        focal: f64,
    },
    Obstruction {
        radius: f64,
        depth: f64,
        side: Side,
    },
    /// Core of a lens/mirror retro-reflector after folding its lens pair
    /// into [`Op::Lens`]: mirror stop in the focal plane, `-2·spacing` of
    /// free space, and the image inversion.
    Retro {
        focal: f64,
        spacing: f64,
        mirror_radius: f64,
    },
    Scale {
        factor: f64,
    },
}

/// Part of the round trip whose power ratio is reported as an efficiency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Segment {
    GainToOutput,
    GainToIrs,
    IrsSurface,
    IrsToOutput,
    OutputToGain,
    GainToInput,
    InputToGain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub segment: Segment,
    pub ops: Vec<Op>,
}

/// A round-trip chain of stages, applied in order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OpticalOperator {
    pub stages: Vec<Stage>,
    pub padding: Padding,
}

impl OpticalOperator {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_ops(segment: Segment, ops: Vec<Op>) -> Self {
        Self {
            stages: vec![Stage { segment, ops }],
            padding: Padding::default(),
        }
    }

    pub fn op_count(&self) -> usize {
        self.stages.iter().map(|s| s.ops.len()).sum()
    }

    pub fn compile(&self, spec: GridSpec, wavelength: f64) -> CompiledOperator {
        let stages = self
            .stages
            .iter()
            .map(|s| {
                let mut obliquity = None;
                let steps = s
                    .ops
                    .iter()
                    .flat_map(|op| {
                        if let Op::Transit { rotation: Some(r), inbound, .. } = op {
                            obliquity = Some(if *inbound { 1.0 } else { r[2][2] });
                        }
                        compile_op(op, spec, wavelength, self.padding)
                    })
                    .collect();
                CompiledStage {
                    segment: s.segment,
                    steps,
                    obliquity,
                }
            })
            .collect();
        CompiledOperator { spec, stages }
    }

    pub fn apply(&self, f: &ComplexField) -> ComplexField {
        let compiled = self.compile(f.spec(), f.wavelength());
        let mut v = f.values().to_vec();
        compiled.apply(&mut v);
        ComplexField::from_values(f.spec(), f.wavelength(), v)
            .expect("operator preserves grid size")
    }
}

enum Step {
    Filter { h: Vec<C64>, padded: bool },
    Rotated { transit: RotatedTransit, padded: bool },
    Mask(Vec<bool>),
    Multiply(Vec<C64>),
    Invert,
    Scale(f64),
}

fn compile_op(op: &Op, spec: GridSpec, wavelength: f64, padding: Padding) -> Vec<Step> {
    let work = |z: f64| {
        if padding.applies(z) {
            (spec.doubled(), true)
        } else {
            (spec, false)
        }
    };
    let step = match *op {
        Op::Propagate { z } => {
            let (g, padded) = work(z);
            Step::Filter {
                h: transfer_function(g, wavelength, z, (0.0, 0.0)),
                padded,
            }
        }
        Op::Transit {
            z,
            shift,
            rotation,
            inbound,
        } => {
            let (g, padded) = work(z);
            match rotation {
                None => Step::Filter {
                    h: transfer_function(g, wavelength, z, shift),
                    padded,
                },
                Some(r) => Step::Rotated {
                    transit: if inbound {
                        RotatedTransit::inbound(g, wavelength, z, shift, &r)
                    } else {
                        RotatedTransit::outbound(g, wavelength, z, shift, &r)
                    },
                    padded,
                },
            }
        }
        Op::Aperture { radius } => Step::Mask(disc_mask(spec, radius)),
        Op::Lens { radius, focal } => Step::Multiply(lens_pupil(spec, wavelength, radius, focal)),
        Op::Obstruction {
            radius,
            depth,
            side,
        } => Step::Mask(obstruction_mask(spec, radius, depth, side)),
        Op::Retro {
            focal,
            spacing,
            mirror_radius,
        } => {
            let mut h = transfer_function(spec, wavelength, -2.0 * spacing, (0.0, 0.0));
            let cutoff = mirror_radius / (wavelength * focal);
            let nu = spec.freqs();
            let n = spec.n();
            for (ky, vy) in nu.iter().enumerate() {
                for (kx, vx) in nu.iter().enumerate() {
                    if vx * vx + vy * vy > cutoff * cutoff {
                        h[ky * n + kx] = C64::new(0.0, 0.0);
                    }
                }
            }
            // image inversion x -> -x carries a factor of -1
            h.iter_mut().for_each(|v| *v = -*v);
            return vec![Step::Filter { h, padded: false }, Step::Invert];
        }
        Op::Scale { factor } => Step::Scale(factor),
    };
    vec![step]
}

struct CompiledStage {
    segment: Segment,
    steps: Vec<Step>,
    obliquity: Option<f64>,
}

/// An operator bound to a grid, with every transfer function precomputed.
pub struct CompiledOperator {
    spec: GridSpec,
    stages: Vec<CompiledStage>,
}

fn apply_step(step: &Step, v: &mut Vec<C64>, n: usize) {
    match step {
        Step::Filter { h, padded: false } => filter_in_place(v, n, h),
        Step::Filter { h, padded: true } => filter_padded_in_place(v, n, h),
        Step::Rotated {
            transit,
            padded: false,
        } => transit.apply(v),
        Step::Rotated {
            transit,
            padded: true,
        } => {
            let mut big = crate::fft::embed(v, n);
            transit.apply(&mut big);
            crate::fft::crop(&big, n, v);
        }
        Step::Mask(m) => mask_in_place(v, m),
        Step::Multiply(p) => multiply_in_place(v, p),
        Step::Invert => v.reverse(),
        Step::Scale(s) => v.iter_mut().for_each(|c| *c *= *s),
    }
}

impl CompiledOperator {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn apply(&self, v: &mut Vec<C64>) {
        let n = self.spec.n();
        for stage in &self.stages {
            for step in &stage.steps {
                apply_step(step, v, n);
            }
        }
    }

    /// Runs the chain stage by stage, returning each stage's power ratio.
    /// Receiver-frame powers are weighted by the obliquity of the tilted
    /// plane so that the ratios multiply to the round-trip power ratio.
    pub fn stage_ratios(&self, v: &mut Vec<C64>) -> Vec<(Segment, f64)> {
        let n = self.spec.n();
        let mut out = Vec::with_capacity(self.stages.len());
        let mut obliquity = 1.0;
        let mut p_in = sum_sqr(v);
        for stage in &self.stages {
            for step in &stage.steps {
                apply_step(step, v, n);
            }
            if let Some(o) = stage.obliquity {
                obliquity = o;
            }
            let p_out = sum_sqr(v) * obliquity;
            out.push((stage.segment, if p_in > 0.0 { p_out / p_in } else { 0.0 }));
            p_in = p_out;
        }
        out
    }
}
