//! Training sweep: codebook, pilot, received samples and the MVU estimate.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{Direction, RadioConstants, RisGeometry};
use crate::codebook::{Codebook, CodebookKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct TrainingDesign {
    pub codebook: Codebook,
    pub sample_period: f64,
    pub symbols_per_slot: usize,
    pub estimation_tolerance: f64,
    pub pilot: Vec<Complex64>,
}

impl TrainingDesign {
    pub fn new(
        codebook: Codebook,
        symbols_per_slot: usize,
        estimation_tolerance: f64,
    ) -> Result<Self> {
        if symbols_per_slot == 0 {
            return Err(Error::invalid("l_tr", "must be at least 1"));
        }
        let sample_period = FRAC_PI_2 / codebook.len() as f64;
        Ok(Self {
            codebook,
            sample_period,
            symbols_per_slot,
            estimation_tolerance,
            pilot: vec![Complex64::new(1.0, 0.0); symbols_per_slot],
        })
    }
}

pub fn training_angles(n_tr: usize) -> Vec<f64> {
    let t = FRAC_PI_2 / n_tr as f64;
    (0..n_tr).map(|n| n as f64 * t).collect()
}

/// Uniform half-open sweep `θ[n] = n (π/2) / n_tr`.
pub fn design_training_codebook(
    geom: &RisGeometry,
    radio: &RadioConstants,
    theta_a: f64,
    n_tr: usize,
) -> Result<Codebook> {
    if n_tr == 0 {
        return Err(Error::invalid("n_tr", "must be at least 1"));
    }
    Codebook::from_angles(
        CodebookKind::Training,
        geom,
        radio,
        theta_a,
        training_angles(n_tr),
        Direction::Downlink,
    )
}

/// Symbols per slot reaching estimation variance `delta` at transmit SNR `snr`.
pub fn min_training_symbols(snr: f64, delta: f64) -> Result<usize> {
    if !(snr > 0.0 && delta > 0.0) {
        return Err(Error::invalid("snr/delta", "must be positive"));
    }
    Ok((1.0 / (snr * delta)).ceil().max(1.0) as usize)
}

/// Circularly-symmetric complex Gaussian with total variance `var`.
pub fn complex_noise<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * s, im * s)
}

/// `w = √ρ_a ζ υ + η` for one training slot.
pub fn simulate_training_rx<R: Rng + ?Sized>(
    rng: &mut R,
    zeta: Complex64,
    pilot: &[Complex64],
    rho_a: f64,
    sigma2: f64,
) -> Vec<Complex64> {
    let amp = rho_a.sqrt() * zeta;
    pilot
        .iter()
        .map(|&p| {
            let clean = amp * p;
            if sigma2 > 0.0 {
                clean + complex_noise(rng, sigma2)
            } else {
                clean
            }
        })
        .collect()
}

/// `ζ̂ = υᵀ w / (L √ρ_a)`.
pub fn mvu_estimate(samples: &[Complex64], pilot: &[Complex64], rho_a: f64) -> Result<Complex64> {
    if samples.len() != pilot.len() {
        return Err(Error::LengthMismatch {
            expected: pilot.len(),
            got: samples.len(),
        });
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput("training samples"));
    }
    let dot: Complex64 = pilot.iter().zip(samples).map(|(p, w)| p * w).sum();
    Ok(dot / (samples.len() as f64 * rho_a.sqrt()))
}
