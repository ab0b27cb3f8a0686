//! Raw file layout. Every table rejects unknown keys.

use serde::Deserialize;

use super::units::{
    Angle, Area, Current, Frequency, Intensity, Length, NonlinearCoefficient, Permittivity, Power,
    Q, Ratio, Resistance, Responsivity, Speed, Temperature,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub wavelength: Q<Length>,
    pub channel: RawChannel,
    pub tx: RawTx,
    pub laser: RawLaser,
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub grid: Option<RawGrid>,
    pub solver: Option<RawSolver>,
    pub padding: Option<RawPadding>,
    pub rx: Option<RawRx>,
    pub obstruction: Option<RawObstruction>,
    pub misalignment: Option<RawMisalignment>,
    pub irs: Option<RawIrs>,
    pub shg: Option<RawShg>,
    pub detector: Option<RawDetector>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub n: Option<usize>,
    pub half_width: Option<Q<Length>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    pub tol: Option<f64>,
    pub max_round_trips: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPadding {
    pub enabled: Option<bool>,
    pub threshold: Option<Q<Length>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChannel {
    pub distance_z: Q<Length>,
    pub mode: Option<String>,
    pub gamma: Option<Q<Ratio>>,
    pub gamma_step: Option<Q<Ratio>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTx {
    pub mirror_radius: Q<Length>,
    pub lens_radius: Q<Length>,
    pub gain_radius: Q<Length>,
    pub spacing: Q<Length>,
    pub focal: Option<Q<Length>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRx {
    pub mirror_radius: Option<Q<Length>>,
    pub lens_radius: Option<Q<Length>>,
    pub spacing: Option<Q<Length>>,
    pub focal: Option<Q<Length>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawObstruction {
    pub depth: Q<Length>,
    pub radius: Option<Q<Length>>,
    pub position: Option<Q<Ratio>>,
    pub side: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRotation {
    pub axis: String,
    pub angle: Q<Angle>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMisalignment {
    pub dx: Option<Q<Length>>,
    pub dy: Option<Q<Length>>,
    pub dz: Option<Q<Length>>,
    #[serde(default)]
    pub rotation: Vec<RawRotation>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawIrs {
    pub theta_i: Option<Q<Angle>>,
    pub phi_i: Option<Q<Angle>>,
    pub theta_r: Option<Q<Angle>>,
    pub phi_r: Option<Q<Angle>>,
    pub dx_i: Option<Q<Length>>,
    pub dx_r: Option<Q<Length>>,
    pub amplitude: Option<Q<Ratio>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLaser {
    #[serde(rename = "P_i")]
    pub p_i: Q<Power>,
    pub eta_e: Option<Q<Ratio>>,
    #[serde(rename = "A_g")]
    pub a_g: Option<Q<Area>>,
    #[serde(rename = "A_b")]
    pub a_b: Option<Q<Area>>,
    #[serde(rename = "I_s")]
    pub i_s: Option<Q<Intensity>>,
    #[serde(rename = "R_i")]
    pub r_i: Option<Q<Ratio>>,
    #[serde(rename = "R_i_v")]
    pub r_i_v: Option<Q<Ratio>>,
    #[serde(rename = "R_i_2v")]
    pub r_i_2v: Option<Q<Ratio>>,
    #[serde(rename = "R_o")]
    pub r_o: Option<Q<Ratio>>,
    #[serde(rename = "R_o_2v")]
    pub r_o_2v: Option<Q<Ratio>>,
    #[serde(rename = "R_E")]
    pub r_e: Option<Q<Ratio>>,
    #[serde(rename = "T_S")]
    pub t_s: Option<Q<Ratio>>,
    pub eta_g: Option<Q<Ratio>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawShg {
    #[serde(rename = "C_n")]
    pub c_n: Option<Q<NonlinearCoefficient>>,
    pub l_s: Option<Q<Length>>,
    pub n_idx: Option<Q<Ratio>>,
    pub epsilon: Option<Q<Permittivity>>,
    pub c: Option<Q<Speed>>,
    pub beam_radius: Option<Q<Length>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDetector {
    pub eta_c: Option<Q<Responsivity>>,
    #[serde(rename = "I_k")]
    pub i_k: Option<Q<Current>>,
    #[serde(rename = "B")]
    pub b: Option<Q<Frequency>>,
    #[serde(rename = "L_r")]
    pub l_r: Option<Q<Resistance>>,
    #[serde(rename = "T")]
    pub t: Option<Q<Temperature>>,
    #[serde(rename = "B_c")]
    pub b_c: Option<Q<Frequency>>,
}
