//! Elementary field transforms: free-space propagation, masks, lenses,
//! obstruction, IRS response, receiver translation and rotation.

mod irs;
mod masks;
mod propagation;
mod rotation;

pub use irs::{apply_irs, irs_path_lengths, irs_phase_gradient, IrsGeometry};
pub use masks::{apply_aperture, apply_lens, apply_obstruction, Side};
pub use propagation::{
    fresnel_kernel, fresnel_reference, propagate, propagate_padded, propagate_shifted,
    transfer_function,
};
pub use rotation::{
    axis_rotation, jacobian, mat_mul, mat_vec, propagate_rotated, rotate_point,
    rotate_to_propagation_frame, transpose, Axis, Mat3, MisalignmentSpec, IDENTITY,
};

pub(crate) use masks::{
    check_obstruction, disc_mask, lens_pupil, mask_in_place, multiply_in_place, obstruction_mask,
};
pub(crate) use propagation::{check_shift, filter_in_place, filter_padded_in_place};
pub(crate) use rotation::RotatedTransit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reverse => -1.0,
        }
    }
}

/// Near-field/far-field boundary `2D²/λ`.
pub fn rayleigh_distance(aperture_diameter: f64, wavelength: f64) -> f64 {
    2.0 * aperture_diameter * aperture_diameter / wavelength
}
