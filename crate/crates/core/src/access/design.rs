//! Access codebook with overlapping main lobes, plus UE power control.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::channel::{Direction, RadioConstants, RisGeometry};
use crate::codebook::{Codebook, CodebookKind};
use crate::error::{Error, Result};
use crate::math::{bisect, sinc};

/// Lowest accepted τ; the first sidelobe of the sinc sits just under it.
pub const MIN_GAIN_FLOOR: f64 = 0.045;

/// Root of `sinc²(x) = τ` on `[0, π)`.
pub fn solve_x_tau(tau: f64) -> Result<f64> {
    if !(tau > MIN_GAIN_FLOOR && tau <= 1.0) {
        return Err(Error::invalid("tau", format!("{tau} outside (0.045, 1]")));
    }
    if tau == 1.0 {
        return Ok(0.0);
    }
    // sinc² decreases monotonically on (0, π)
    Ok(bisect(|x| sinc(x).powi(2) - tau, 0.0, PI, 1e-13))
}

pub fn access_lower_bound(geom: &RisGeometry, radio: &RadioConstants, tau: f64) -> Result<usize> {
    let x = solve_x_tau(tau)?;
    if x == 0.0 {
        return Err(Error::invalid("tau", "τ = 1 admits no finite coverage"));
    }
    let f0 = geom.fundamental_frequency(radio);
    Ok((PI * geom.m_x as f64 * f0 / (2.0 * x)).ceil() as usize)
}

/// What to do when a codebook larger than the bound pushes two or more
/// slicing-rule sines below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessOverflow {
    /// Clamp negative sines to zero.
    Clip,
    /// Spread all slots evenly in sine space: `sin θ[n] = (2n + 1) / (2N)`.
    #[default]
    Stretch,
}

#[derive(Debug, Clone)]
pub struct AccessDesign {
    /// Uplink realizations.
    pub codebook: Codebook,
    /// Downlink realizations of the same angles, reused for ACK.
    pub downlink: Codebook,
    pub min_gain: f64,
    pub gain_abscissa: f64,
    pub lower_bound: usize,
}

impl AccessDesign {
    pub fn angles(&self) -> &[f64] {
        &self.codebook.angles
    }

    pub fn len(&self) -> usize {
        self.codebook.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codebook.is_empty()
    }
}

/// Sines of the access angles from the power-slicing rule.
pub fn access_sines(
    n_ac: usize,
    x_tau: f64,
    f0: f64,
    m_x: usize,
    overflow: AccessOverflow,
) -> Vec<f64> {
    let step = x_tau / (PI * f0 * m_x as f64);
    let literal = |n: usize| 1.0 - (2.0 * (n_ac - n) as f64 - 1.0) * step;
    // a single slot pushed below zero still yields distinct angles once clamped
    if n_ac < 2 || literal(1) >= 0.0 {
        return (0..n_ac).map(|n| literal(n).max(0.0)).collect();
    }
    match overflow {
        AccessOverflow::Clip => (0..n_ac).map(|n| literal(n).max(0.0)).collect(),
        AccessOverflow::Stretch => (0..n_ac)
            .map(|n| (2 * n + 1) as f64 / (2 * n_ac) as f64)
            .collect(),
    }
}

pub fn design_access_codebook(
    geom: &RisGeometry,
    radio: &RadioConstants,
    theta_a: f64,
    tau: f64,
    n_ac: usize,
    overflow: AccessOverflow,
) -> Result<AccessDesign> {
    let x_tau = solve_x_tau(tau)?;
    let bound = access_lower_bound(geom, radio, tau)?;
    if n_ac < bound {
        return Err(Error::BelowBound { n_ac, bound });
    }
    let f0 = geom.fundamental_frequency(radio);
    let angles: Vec<f64> = access_sines(n_ac, x_tau, f0, geom.m_x, overflow)
        .into_iter()
        .map(|s| s.clamp(0.0, 1.0).asin().min(FRAC_PI_2))
        .collect();
    let codebook = Codebook::from_angles(
        CodebookKind::Access,
        geom,
        radio,
        theta_a,
        angles.clone(),
        Direction::Uplink,
    )?;
    let downlink = Codebook::from_angles(
        CodebookKind::Access,
        geom,
        radio,
        theta_a,
        angles,
        Direction::Downlink,
    )?;
    Ok(AccessDesign {
        codebook,
        downlink,
        min_gain: tau,
        gain_abscissa: x_tau,
        lower_bound: bound,
    })
}

/// `E{β^UL}` for UEs spread uniformly over the annular sector.
pub fn expected_ul_pathloss(
    geom: &RisGeometry,
    gain_ap: f64,
    gain_ue: f64,
    d_ap: f64,
    d_min: f64,
    d_max: f64,
) -> Result<f64> {
    if !(d_min > 0.0 && d_min < d_max) {
        return Err(Error::invalid("d_min/d_max", "need 0 < d_min < d_max"));
    }
    let r = geom.d_x * geom.d_z / d_ap;
    Ok(
        gain_ap * gain_ue / (4.0 * PI).powi(2) * r * r * (d_max.ln() - d_min.ln())
            / (d_max * d_max - d_min * d_min),
    )
}

/// UE transmit power reaching `γ_ac` at gain `τ` for the average pathloss.
pub fn min_ue_power(
    expected_pathloss: f64,
    elements: usize,
    gamma_ac: f64,
    tau: f64,
    sigma2: f64,
) -> Result<f64> {
    if !(expected_pathloss > 0.0 && gamma_ac > 0.0 && tau > 0.0 && sigma2 > 0.0) {
        return Err(Error::invalid("power control", "inputs must be positive"));
    }
    let m = elements as f64;
    Ok(sigma2 * gamma_ac / (expected_pathloss * m * m * tau))
}
