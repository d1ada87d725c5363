//! Far-field model of the AP–RIS–UE cascaded link.
//!
//! Angles are measured from the panel normal and restricted to the
//! principal plane, `θ ∈ [0, π/2]`. Element indices run `m = 0..M_x` and the
//! per-element phase uses the factor `(m + 1)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math::{sinc, wrap_2pi, SINGULARITY_EPS};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConstants {
    pub carrier_frequency: f64,
    pub wavelength: f64,
    pub wavenumber: f64,
}

impl RadioConstants {
    pub fn from_frequency(carrier_frequency: f64) -> Result<Self> {
        if !(carrier_frequency > 0.0 && carrier_frequency.is_finite()) {
            return Err(Error::invalid("carrier_frequency", "must be positive"));
        }
        Ok(Self::from_wavelength_unchecked(
            SPEED_OF_LIGHT / carrier_frequency,
        ))
    }

    pub fn from_wavelength(wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::invalid("wavelength", "must be positive"));
        }
        Ok(Self::from_wavelength_unchecked(wavelength))
    }

    fn from_wavelength_unchecked(wavelength: f64) -> Self {
        Self {
            carrier_frequency: SPEED_OF_LIGHT / wavelength,
            wavelength,
            wavenumber: 2.0 * PI / wavelength,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisGeometry {
    pub m_x: usize,
    pub m_z: usize,
    pub d_x: f64,
    pub d_z: f64,
}

impl RisGeometry {
    pub fn new(m_x: usize, m_z: usize, d_x: f64, d_z: f64, radio: &RadioConstants) -> Result<Self> {
        if m_x == 0 || m_z == 0 {
            return Err(Error::invalid(
                "m_x/m_z",
                "element counts must be at least 1",
            ));
        }
        // small slack so that d = λ computed through a ratio still passes
        let lim = radio.wavelength * (1.0 + 1e-12);
        if !(d_x > 0.0 && d_x <= lim) {
            return Err(Error::invalid("d_x", "must lie in (0, λ]"));
        }
        if !(d_z > 0.0 && d_z <= lim) {
            return Err(Error::invalid("d_z", "must lie in (0, λ]"));
        }
        Ok(Self { m_x, m_z, d_x, d_z })
    }

    pub fn elements(&self) -> usize {
        self.m_x * self.m_z
    }

    pub fn panel_width(&self) -> f64 {
        self.m_x as f64 * self.d_x
    }

    pub fn panel_height(&self) -> f64 {
        self.m_z as f64 * self.d_z
    }

    /// Fundamental spatial frequency `F_0 = d_x / λ`.
    pub fn fundamental_frequency(&self, radio: &RadioConstants) -> f64 {
        self.d_x / radio.wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePlacement {
    pub distance: f64,
    pub angle: f64,
    /// Linear antenna gain.
    pub gain: f64,
}

impl NodePlacement {
    pub fn new(distance: f64, angle: f64, gain: f64) -> Result<Self> {
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::invalid("distance", "must be positive"));
        }
        check_angle("angle", angle)?;
        if !(gain >= 0.0) {
            return Err(Error::invalid("gain", "must be nonnegative"));
        }
        Ok(Self {
            distance,
            angle,
            gain,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Downlink,
    Uplink,
}

/// A reflecting angle realized as per-element phase shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub reflect_angle: f64,
    pub phase_shifts: Vec<f64>,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelResponse {
    pub value: Complex64,
    pub pathloss: f64,
    /// `ω ψ`, not reduced.
    pub phase: f64,
    pub array_factor: Complex64,
}

pub(crate) fn check_angle(name: &'static str, angle: f64) -> Result<()> {
    // tolerate a couple of ulps past the ends from degree conversions
    if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&angle) {
        return Err(Error::invalid(name, format!("{angle} outside [0, π/2]")));
    }
    Ok(())
}

pub fn far_field_min_distance(geom: &RisGeometry, radio: &RadioConstants) -> f64 {
    let dx = geom.panel_width();
    let dz = geom.panel_height();
    2.0 / radio.wavelength * (dx * dx).max(dz * dz)
}

/// Phase shifts steering the beam from the AP at `theta_a` toward `theta_r`.
pub fn config_for_angle(
    geom: &RisGeometry,
    radio: &RadioConstants,
    theta_a: f64,
    theta_r: f64,
    direction: Direction,
) -> Result<Configuration> {
    check_angle("theta_a", theta_a)?;
    check_angle("theta_r", theta_r)?;
    let base = radio.wavenumber * geom.d_x * (theta_a.sin() - theta_r.sin());
    let sign = match direction {
        Direction::Downlink => 1.0,
        Direction::Uplink => -1.0,
    };
    let phase_shifts = (0..geom.m_x)
        .map(|m| wrap_2pi(sign * base * (m + 1) as f64))
        .collect();
    Ok(Configuration {
        reflect_angle: theta_r,
        phase_shifts,
        direction,
    })
}

/// Direct-sum array factor `M_z Σ_m exp(j ω d_x (m+1)(sin θ_k − sin θ_r))`.
pub fn array_factor(
    geom: &RisGeometry,
    radio: &RadioConstants,
    theta_k: f64,
    theta_r: f64,
) -> Complex64 {
    let u = radio.wavenumber * geom.d_x * (theta_k.sin() - theta_r.sin());
    let sum: Complex64 = (0..geom.m_x)
        .map(|m| Complex64::from_polar(1.0, u * (m + 1) as f64))
        .sum();
    sum * geom.m_z as f64
}

/// Geometric-series form of [`array_factor`].
pub fn array_factor_closed_form(
    geom: &RisGeometry,
    radio: &RadioConstants,
    theta_k: f64,
    theta_r: f64,
) -> Complex64 {
    let u = radio.wavenumber * geom.d_x * (theta_k.sin() - theta_r.sin());
    linear_array_sum(geom.m_x, u) * geom.m_z as f64
}

/// `Σ_{m=1}^{n} exp(j m u)` in closed form.
pub fn linear_array_sum(n: usize, u: f64) -> Complex64 {
    // the sum is 2π-periodic in u, so fold grating lobes onto the main lobe
    let u = u - 2.0 * PI * (u / (2.0 * PI)).round();
    Complex64::from_polar(1.0, u * (n as f64 + 1.0) / 2.0) * dirichlet(n, u)
}

/// `sin(N u/2) / sin(u/2)` with the removable singularity at `u = 0` mod 2π.
fn dirichlet(n: usize, u: f64) -> f64 {
    let den = (u / 2.0).sin();
    if den.abs() < SINGULARITY_EPS {
        n as f64
    } else {
        (n as f64 * u / 2.0).sin() / den
    }
}

/// `|A|² / M²` for a linear array of `m_x` elements at phase step `u`.
pub fn normalized_array_power(m_x: usize, u: f64) -> f64 {
    let u = u - 2.0 * PI * (u / (2.0 * PI)).round();
    let d = dirichlet(m_x, u) / m_x as f64;
    d * d
}

fn check_distances(ap: &NodePlacement, ue: &NodePlacement) -> Result<()> {
    if !(ap.distance > 0.0) || !(ue.distance > 0.0) {
        return Err(Error::invalid("distance", "zero distance"));
    }
    Ok(())
}

fn pathloss_common(geom: &RisGeometry, ap: &NodePlacement, ue: &NodePlacement) -> f64 {
    let r = geom.d_x * geom.d_z / (ap.distance * ue.distance);
    ap.gain * ue.gain / (4.0 * PI).powi(2) * r * r
}

pub fn dl_pathloss(
    geom: &RisGeometry,
    _radio: &RadioConstants,
    ap: &NodePlacement,
    ue: &NodePlacement,
) -> Result<f64> {
    check_distances(ap, ue)?;
    Ok(pathloss_common(geom, ap, ue) * ap.angle.cos().powi(2))
}

pub fn ul_pathloss(
    geom: &RisGeometry,
    _radio: &RadioConstants,
    ap: &NodePlacement,
    ue: &NodePlacement,
) -> Result<f64> {
    check_distances(ap, ue)?;
    Ok(pathloss_common(geom, ap, ue) * ue.angle.cos().powi(2))
}

/// Propagation path term ψ in meters; multiply by ω for radians.
pub fn propagation_phase(geom: &RisGeometry, ap: &NodePlacement, ue: &NodePlacement) -> f64 {
    let centre = (geom.m_x as f64 + 1.0) / 2.0 * geom.d_x;
    -(ap.distance + ue.distance - (ap.angle.sin() - ue.angle.sin()) * centre)
}

pub fn channel_response(
    geom: &RisGeometry,
    radio: &RadioConstants,
    ap: &NodePlacement,
    ue: &NodePlacement,
    theta_r: f64,
    direction: Direction,
) -> Result<ChannelResponse> {
    let a = array_factor_closed_form(geom, radio, ue.angle, theta_r);
    let phase = radio.wavenumber * propagation_phase(geom, ap, ue);
    let (pathloss, value, af) = match direction {
        Direction::Downlink => {
            let b = dl_pathloss(geom, radio, ap, ue)?;
            (b, b.sqrt() * Complex64::from_polar(1.0, phase) * a, a)
        }
        Direction::Uplink => {
            let b = ul_pathloss(geom, radio, ap, ue)?;
            let ac = a.conj();
            (b, b.sqrt() * Complex64::from_polar(1.0, -phase) * ac, ac)
        }
    };
    Ok(ChannelResponse {
        value,
        pathloss,
        phase,
        array_factor: af,
    })
}

/// Draw a UE uniformly over the annular quarter-sector `[d_min, d_max] × [0, π/2]`.
pub fn sample_ue_placement<R: Rng + ?Sized>(
    rng: &mut R,
    d_min: f64,
    d_max: f64,
    gain: f64,
) -> Result<NodePlacement> {
    if !(d_min > 0.0 && d_min < d_max) {
        return Err(Error::invalid("d_min/d_max", "need 0 < d_min < d_max"));
    }
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    Ok(NodePlacement {
        distance: placement_distance(u, d_min, d_max),
        angle: v * FRAC_PI_2,
        gain,
    })
}

/// Inverse CDF of the radial density `2d / (d_max² − d_min²)`.
pub fn placement_distance(u: f64, d_min: f64, d_max: f64) -> f64 {
    (d_min * d_min + u * (d_max * d_max - d_min * d_min)).sqrt()
}

/// Source and destination directions for the general scattered-field pathloss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistaticLink {
    pub source_azimuth: f64,
    pub source_elevation: f64,
    pub destination_azimuth: f64,
    pub destination_elevation: f64,
    pub omega_x: f64,
    pub omega_z: f64,
}

impl BistaticLink {
    pub fn new(radio: &RadioConstants, phi_s: f64, theta_s: f64, phi_d: f64, theta_d: f64) -> Self {
        let w = radio.wavenumber;
        Self {
            source_azimuth: phi_s,
            source_elevation: theta_s,
            destination_azimuth: phi_d,
            destination_elevation: theta_d,
            omega_x: w * (phi_s.cos() * theta_s.sin() + phi_d.cos() * theta_d.sin()),
            omega_z: w * (theta_s.cos() + theta_d.cos()),
        }
    }
}

/// General bistatic pathloss with element-pattern sinc factors.
///
/// `gains` and `distances` are `(source, destination)` pairs; `array_factor_sq`
/// is `|A|²` evaluated by the caller.
pub fn bistatic_pathloss(
    link: &BistaticLink,
    geom: &RisGeometry,
    gains: (f64, f64),
    distances: (f64, f64),
    array_factor_sq: f64,
) -> f64 {
    let r = geom.d_x * geom.d_z / (distances.0 * distances.1);
    let sx = sinc(geom.d_x * link.omega_x / 2.0);
    let sz = sinc(geom.d_z * link.omega_z / 2.0);
    gains.0 * gains.1 / (4.0 * PI).powi(2)
        * r
        * r
        * link.source_azimuth.sin().powi(2)
        * link.destination_elevation.sin().powi(2)
        * sx
        * sx
        * sz
        * sz
        * array_factor_sq
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamWidths {
    pub fnbw: f64,
    pub hpbw: f64,
    pub coverage_count: usize,
}

/// Beam widths in sine space and the number of half-power beams covering
/// `sin θ ∈ [0, 1]`; `a` is the sinc abscissa of the -3 dB point.
pub fn beam_widths(geom: &RisGeometry, radio: &RadioConstants, a: f64) -> BeamWidths {
    let nd = geom.m_x as f64 * geom.d_x;
    let lam = radio.wavelength;
    BeamWidths {
        fnbw: 2.0 * lam / nd,
        hpbw: 2.0 * lam * a / (nd * PI),
        coverage_count: (nd * PI / (2.0 * lam * a)).ceil() as usize,
    }
}
