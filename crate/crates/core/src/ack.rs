//! Downlink acknowledgment codebooks and the per-UE ACK check.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::access::DecodeResult;
use crate::error::{Error, Result};
use crate::training::complex_noise;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AckMode {
    /// No ACK phase; success is judged at decoding.
    None,
    Precoding,
    Tdma,
}

impl AckMode {
    pub fn name(self) -> &'static str {
        match self {
            AckMode::None => "none",
            AckMode::Precoding => "precoding",
            AckMode::Tdma => "tdma",
        }
    }
}

impl std::str::FromStr for AckMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [AckMode::None, AckMode::Precoding, AckMode::Tdma]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown ack mode `{s}`")))
    }
}

/// Divisor for the precoding angle average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AckNormalization {
    #[default]
    DecodedSlots,
    /// Divide by every contender in the frame, decoded or not.
    Contenders,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AckDesign {
    pub mode: AckMode,
    pub angles: Vec<f64>,
    /// Decode slot each ACK angle came from; empty for precoding.
    pub slots: Vec<usize>,
}

impl AckDesign {
    /// Reflecting angle used for UE `k`'s ACK.
    pub fn angle_for(&self, decode: &DecodeResult, k: usize) -> Option<f64> {
        match self.mode {
            AckMode::None => None,
            AckMode::Precoding => self.angles.first().copied(),
            AckMode::Tdma => {
                let slot = decode.slot_of.get(&k)?;
                let i = self.slots.binary_search(slot).ok()?;
                Some(self.angles[i])
            }
        }
    }
}

pub fn design_ack_precoding(
    decode: &DecodeResult,
    access_angles: &[f64],
    normalization: AckNormalization,
    contenders: usize,
) -> Result<AckDesign> {
    if decode.decode_slots.is_empty() {
        return Err(Error::EmptyInput("decoded slots"));
    }
    let sum: f64 = decode.decode_slots.iter().map(|&n| access_angles[n]).sum();
    let div = match normalization {
        AckNormalization::DecodedSlots => decode.decode_slots.len(),
        AckNormalization::Contenders => contenders.max(1),
    };
    Ok(AckDesign {
        mode: AckMode::Precoding,
        angles: vec![sum / div as f64],
        slots: Vec::new(),
    })
}

pub fn design_ack_tdma(decode: &DecodeResult, access_angles: &[f64]) -> Result<AckDesign> {
    if decode.decode_slots.is_empty() {
        return Err(Error::EmptyInput("decoded slots"));
    }
    Ok(AckDesign {
        mode: AckMode::Tdma,
        angles: decode
            .decode_slots
            .iter()
            .map(|&n| access_angles[n])
            .collect(),
        slots: decode.decode_slots.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AckOutcome {
    pub acked: Vec<usize>,
    pub unsuccessful: Vec<usize>,
}

/// Received ACK energy test `‖w'‖² / (L σ²) ≥ γ_ack` with all-ones messages.
pub fn ack_received<R: Rng + ?Sized>(
    rng: &mut R,
    zeta: Complex64,
    rho_a: f64,
    sigma2: f64,
    l_ack: usize,
    gamma_ack: f64,
) -> bool {
    let clean = rho_a.sqrt() * zeta;
    if sigma2 <= 0.0 {
        return clean.norm_sqr() > 0.0;
    }
    let energy: f64 = (0..l_ack)
        .map(|_| (clean + complex_noise(rng, sigma2)).norm_sqr())
        .sum();
    energy / (l_ack as f64 * sigma2) >= gamma_ack
}

/// ACK every decoded UE through its assigned configuration.
///
/// `dl(k, θ)` is UE `k`'s true downlink response at reflecting angle `θ`;
/// `contenders` is the frame size used to list the unsuccessful UEs.
#[allow(clippy::too_many_arguments)]
pub fn simulate_and_check_ack<R: Rng + ?Sized>(
    rng: &mut R,
    decode: &DecodeResult,
    design: &AckDesign,
    dl: impl Fn(usize, f64) -> Complex64,
    contenders: usize,
    rho_a: f64,
    sigma2: f64,
    l_ack: usize,
    gamma_ack: f64,
) -> AckOutcome {
    let mut acked = Vec::new();
    for &k in &decode.decoded {
        let Some(theta) = design.angle_for(decode, k) else {
            continue;
        };
        if ack_received(rng, dl(k, theta), rho_a, sigma2, l_ack, gamma_ack) {
            acked.push(k);
        }
    }
    let unsuccessful = (0..contenders)
        .filter(|k| acked.binary_search(k).is_err())
        .collect();
    AckOutcome {
        acked,
        unsuccessful,
    }
}
