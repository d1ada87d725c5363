use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::mean_ci95;
use crate::protocol::FrameOutcome;

/// One CSV row. Optional cells are left empty when a preset does not
/// produce that quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub preset: String,
    pub kappa: f64,
    pub policy: String,
    pub ack_mode: String,
    pub t_sw: f64,
    pub se_target: Option<f64>,
    pub n_tr: usize,
    pub n_ac: usize,
    pub trials: usize,
    pub p_access_mean: Option<f64>,
    pub p_access_ci95: Option<f64>,
    pub throughput_mean: Option<f64>,
    pub throughput_ci95: Option<f64>,
    pub se_mean: Option<f64>,
    pub seed: u64,
}

pub const CSV_COLUMNS: [&str; 15] = [
    "preset",
    "kappa",
    "policy",
    "ack_mode",
    "t_sw",
    "se_target",
    "n_tr",
    "n_ac",
    "trials",
    "p_access_mean",
    "p_access_ci95",
    "throughput_mean",
    "throughput_ci95",
    "se_mean",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p_access_mean: f64,
    pub p_access_ci95: f64,
    pub throughput_mean: f64,
    pub throughput_ci95: f64,
    /// Frames with at least one contender.
    pub active_frames: usize,
}

/// Access probability over frames with `K ≥ 1` and throughput
/// `|A| / T` over all frames, with `T` evaluated at switching time `t_sw`.
///
/// Frames without training (the random baseline) already carry `C_tr = 0`,
/// so their `T` is `T_ac + T_ack`.
pub fn estimate_metrics(outcomes: &[FrameOutcome], t_sw: f64) -> Result<Estimate> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("frame outcomes"));
    }
    let p: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.contenders > 0)
        .map(|o| o.successes() as f64 / o.contenders as f64)
        .collect();
    let th: Vec<f64> = outcomes
        .iter()
        .map(|o| o.successes() as f64 / o.timing_at(t_sw).total)
        .collect();
    let (pm, pc) = if p.is_empty() {
        (0.0, 0.0)
    } else {
        mean_ci95(&p)
    };
    let (tm, tc) = mean_ci95(&th);
    Ok(Estimate {
        p_access_mean: pm,
        p_access_ci95: pc,
        throughput_mean: tm,
        throughput_ci95: tc,
        active_frames: p.len(),
    })
}
