//! Uplink access: codebook, power control, slot policies and SIC decoding.

mod design;
mod policy;
mod reception;

use num_complex::Complex64;

use crate::training::ReconstructionModel;

pub use design::{
    access_lower_bound, access_sines, design_access_codebook, expected_ul_pathloss, min_ue_power,
    solve_x_tau, AccessDesign, AccessOverflow, MIN_GAIN_FLOOR,
};
pub use policy::{policy_carap, policy_gscap, policy_rrs_aloha, policy_smap, AccessSet, Policy};
pub use reception::{contender_map, decode_access, simulate_access, DecodeResult, SlotReception};

/// Predicted uplink response for every access slot, read off the
/// downlink-trained model by reciprocity.
pub fn infer_ul(model: &ReconstructionModel, angles: &[f64]) -> Vec<Complex64> {
    angles.iter().map(|&t| model.query(t)).collect()
}
