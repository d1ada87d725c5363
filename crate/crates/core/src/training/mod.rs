//! Downlink training sweep and the channel model each UE builds from it.

mod design;
mod reconstruction;
mod spectrum;

pub use design::{
    complex_noise, design_training_codebook, min_training_symbols, mvu_estimate,
    simulate_training_rx, training_angles, TrainingDesign,
};
pub use reconstruction::{
    basis_weights, normalized_expected_se, reconstruct, Kernel, ReconstructionModel,
};
pub use spectrum::{
    analyze_signal, codebook_statistics, coefficient_cap, training_lower_bound, uniform_theta_grid,
    CodebookStatistics, SpatialSignalAnalysis, DEFAULT_GRID_POINTS, DEFAULT_QUADRATURE_POINTS,
    MAX_COEFFICIENT_CAP,
};
