//! One random-access frame: training sweep, access, decoding and ACK.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::access::{
    access_lower_bound, contender_map, decode_access, design_access_codebook, expected_ul_pathloss,
    infer_ul, min_ue_power, policy_carap, policy_gscap, policy_rrs_aloha, policy_smap,
    simulate_access, AccessDesign, AccessSet, DecodeResult, Policy, SlotReception,
};
use crate::ack::{
    design_ack_precoding, design_ack_tdma, simulate_and_check_ack, AckMode, AckOutcome,
};
use crate::channel::{
    channel_response, far_field_min_distance, sample_ue_placement, Direction, NodePlacement,
    RadioConstants, RisGeometry,
};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::math::{db_to_linear, dbm_to_watts};
use crate::protocol::config::{NtrMode, PowerMode, ScenarioConfig};
use crate::protocol::seed::{trial_rng, Stream};
use crate::protocol::timing::{frame_timing, FrameTiming, PhaseCounts};
use crate::training::{
    codebook_statistics, design_training_codebook, min_training_symbols, mvu_estimate, reconstruct,
    simulate_training_rx, uniform_theta_grid, ReconstructionModel, DEFAULT_GRID_POINTS,
};

pub fn sample_load<R: Rng + ?Sized>(rng: &mut R, kappa: f64) -> Result<usize> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid("kappa", "must be positive"));
    }
    let k: f64 = Poisson::new(kappa)
        .map_err(|e| Error::invalid("kappa", e.to_string()))?
        .sample(rng);
    Ok(k as usize)
}

/// A configuration resolved into physical quantities and codebooks. Built
/// once and shared by every frame.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub radio: RadioConstants,
    pub geom: RisGeometry,
    pub ap: NodePlacement,
    pub gain_ue: f64,
    pub rho_ap: f64,
    pub rho_ue: f64,
    pub sigma2: f64,
    pub gamma_ac: f64,
    pub gamma_ack: f64,
    pub training: Codebook,
    pub sample_period: f64,
    pub l_tr: usize,
    pub access: AccessDesign,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let c = &config;
        let radio = RadioConstants::from_frequency(c.carrier_frequency_hz)?;
        let geom = RisGeometry::new(
            c.m_x,
            c.m_z,
            c.d_x_wavelengths * radio.wavelength,
            c.d_z_wavelengths * radio.wavelength,
            &radio,
        )?;
        if !(c.d_min_m > 0.0 && c.d_min_m < c.d_max_m) {
            return Err(Error::invalid("d_min_m/d_max_m", "need 0 < d_min < d_max"));
        }
        if c.r_replicas == 0 {
            return Err(Error::invalid("r_replicas", "must be at least 1"));
        }
        if c.l_ac == 0 || c.l_ack == 0 {
            return Err(Error::invalid("l_ac/l_ack", "must be at least 1"));
        }
        if !(c.t_sw >= 0.0) {
            return Err(Error::invalid("t_sw", "must be nonnegative"));
        }
        if let Some(se) = c.se_target {
            if !(se >= 0.0) {
                return Err(Error::invalid("se_target", "must be nonnegative"));
            }
        }
        let theta_a = c.theta_ap_deg.to_radians();
        let ap = NodePlacement::new(c.d_ap_m, theta_a, db_to_linear(c.gain_ap_db))?;
        let gain_ue = db_to_linear(c.gain_ue_db);
        let sigma2 = dbm_to_watts(c.noise_dbm);
        let rho_ap = dbm_to_watts(c.rho_ap_dbm);
        let gamma_ac = db_to_linear(c.gamma_ac_db);
        let gamma_ack = db_to_linear(c.gamma_ack_db);
        let elements = geom.elements();

        let e_ul =
            expected_ul_pathloss(&geom, ap.gain, gain_ue, ap.distance, c.d_min_m, c.d_max_m)?;
        let rho_ue = match c.power_mode {
            PowerMode::Fixed => dbm_to_watts(c.rho_ue_dbm),
            PowerMode::Policy => min_ue_power(e_ul, elements, gamma_ac, c.tau, sigma2)?,
        };

        let n_tr = match c.n_tr_mode {
            NtrMode::Fixed => c.n_tr,
            mode => {
                let stats = codebook_statistics(
                    &geom,
                    &radio,
                    c.epsilon,
                    &uniform_theta_grid(DEFAULT_GRID_POINTS),
                )?;
                match mode {
                    NtrMode::Median => stats.median_bound,
                    NtrMode::Max => stats.max_bound,
                    _ => stats.taylor_bound,
                }
            }
        };
        let training = design_training_codebook(&geom, &radio, theta_a, n_tr)?;
        let sample_period = std::f64::consts::FRAC_PI_2 / n_tr as f64;

        let snr_ap = rho_ap / sigma2;
        let l_tr = match (c.se_target, c.l_tr, c.delta_tol) {
            (_, Some(l), _) => l.max(1),
            // the SE target doubles as the estimation tolerance
            (Some(se), None, _) if se > 0.0 => min_training_symbols(snr_ap, se)?,
            (Some(_), None, _) => 1,
            (None, None, Some(delta)) => min_training_symbols(snr_ap, delta)?,
            (None, None, None) => 1,
        };

        let bound = access_lower_bound(&geom, &radio, c.tau)?;
        let n_ac = match c.n_ac {
            Some(n) => n,
            None => (c.kappa.round() as usize).max(bound),
        };
        let access =
            design_access_codebook(&geom, &radio, theta_a, c.tau, n_ac, c.access_overflow)?;
        if c.r_replicas > n_ac {
            return Err(Error::invalid(
                "r_replicas",
                "exceeds the number of access slots",
            ));
        }

        let mut warnings = Vec::new();
        let ff = far_field_min_distance(&geom, &radio);
        if c.d_min_m < ff || c.d_ap_m < ff {
            warnings.push(format!(
                "distances below the far-field limit {ff:.3} m (d_min = {} m, d_ap = {} m)",
                c.d_min_m, c.d_ap_m
            ));
        }

        Ok(Self {
            config,
            radio,
            geom,
            ap,
            gain_ue,
            rho_ap,
            rho_ue,
            sigma2,
            gamma_ac,
            gamma_ack,
            training,
            sample_period,
            l_tr,
            access,
            warnings,
        })
    }

    pub fn n_tr(&self) -> usize {
        self.training.len()
    }

    pub fn n_ac(&self) -> usize {
        self.access.len()
    }

    pub fn response(&self, ue: &NodePlacement, theta_r: f64, direction: Direction) -> Complex64 {
        channel_response(&self.geom, &self.radio, &self.ap, ue, theta_r, direction)
            .map(|r| r.value)
            .unwrap_or_default()
    }

    /// Train a UE's model over the training sweep.
    pub fn train_ue<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        ue: &NodePlacement,
    ) -> Result<ReconstructionModel> {
        let truth: Vec<Complex64> = self
            .training
            .angles
            .iter()
            .map(|&t| self.response(ue, t, Direction::Downlink))
            .collect();
        let pilot = vec![Complex64::new(1.0, 0.0); self.l_tr];
        let noise = match self.config.se_target {
            Some(se) => {
                // per-sample variance that leaves the MVU estimate with
                // variance se · mean |ζ|²
                let mean_pow = truth.iter().map(|z| z.norm_sqr()).sum::<f64>() / truth.len() as f64;
                se * mean_pow * self.rho_ap * self.l_tr as f64
            }
            None => self.sigma2,
        };
        let estimates = truth
            .iter()
            .map(|&z| {
                let w = simulate_training_rx(rng, z, &pilot, self.rho_ap, noise);
                mvu_estimate(&w, &pilot, self.rho_ap)
            })
            .collect::<Result<Vec<_>>>()?;
        reconstruct(&estimates, self.sample_period, self.config.kernel)
    }

    pub fn run_frame(&self, seed: u64, trial: u64) -> Result<FrameOutcome> {
        self.run_frame_with(self.config.policy, self.config.ack_mode, seed, trial, false)
    }

    pub fn run_frame_with(
        &self,
        policy: Policy,
        ack_mode: AckMode,
        seed: u64,
        trial: u64,
        trace: bool,
    ) -> Result<FrameOutcome> {
        let c = &self.config;
        let mut rng = trial_rng(seed, trial, Stream::Load);
        let k = sample_load(&mut rng, c.kappa)?;
        let placements = (0..k)
            .map(|_| sample_ue_placement(&mut rng, c.d_min_m, c.d_max_m, self.gain_ue))
            .collect::<Result<Vec<_>>>()?;

        let angles = self.access.angles();
        let n_ac = angles.len();
        let r = c.r_replicas;
        let mut rng_tr = trial_rng(seed, trial, Stream::Training);
        let mut rng_pol = trial_rng(seed, trial, Stream::Policy);
        let snr_ul = self.rho_ue / self.sigma2;
        let mut sets = Vec::with_capacity(k);
        for ue in &placements {
            let set = if policy.uses_oracle() {
                let model = self.train_ue(&mut rng_tr, ue)?;
                let pred = infer_ul(&model, angles);
                match policy {
                    Policy::Carap => policy_carap(&mut rng_pol, &pred, r)?,
                    Policy::Gscap => policy_gscap(&pred, r)?,
                    Policy::Smap => policy_smap(&pred, snr_ul, self.gamma_ac)?,
                    Policy::RrsAloha => unreachable!(),
                }
            } else {
                policy_rrs_aloha(&mut rng_pol, n_ac, r)?
            };
            sets.push(set);
        }

        let contenders = contender_map(&sets, n_ac)?;
        let ul_snr = |ue: usize, n: usize| {
            let z = self.response(&placements[ue], angles[n], Direction::Uplink);
            self.rho_ue * z.norm_sqr() / self.sigma2
        };
        let decode = decode_access(&contenders, ul_snr, self.gamma_ac);

        let reception = if trace {
            let ul: Vec<Vec<Complex64>> = placements
                .iter()
                .map(|ue| {
                    angles
                        .iter()
                        .map(|&t| self.response(ue, t, Direction::Uplink))
                        .collect()
                })
                .collect();
            let mut rng_noise = trial_rng(seed, trial, Stream::AccessNoise);
            let rho = vec![self.rho_ue; k];
            Some(simulate_access(
                &mut rng_noise,
                &ul,
                &sets,
                &rho,
                self.sigma2,
                c.l_ac,
            )?)
        } else {
            None
        };

        let ack = match ack_mode {
            AckMode::None => None,
            _ if decode.decoded.is_empty() => Some(AckOutcome {
                acked: Vec::new(),
                unsuccessful: (0..k).collect(),
            }),
            mode => {
                let design = if mode == AckMode::Precoding {
                    design_ack_precoding(&decode, angles, c.ack_normalization, k)?
                } else {
                    design_ack_tdma(&decode, angles)?
                };
                let mut rng_ack = trial_rng(seed, trial, Stream::Ack);
                let dl = |ue: usize, t: f64| self.response(&placements[ue], t, Direction::Downlink);
                Some(simulate_and_check_ack(
                    &mut rng_ack,
                    &decode,
                    &design,
                    dl,
                    k,
                    self.rho_ap,
                    self.sigma2,
                    c.l_ack,
                    self.gamma_ack,
                ))
            }
        };

        let counts = PhaseCounts {
            c_tr: if policy.uses_oracle() { self.n_tr() } else { 0 },
            c_ac: n_ac,
            c_ack: decode.decoded.len(),
            l_tr: self.l_tr,
            l_ac: c.l_ac,
            l_ack: c.l_ack,
        };
        Ok(FrameOutcome {
            contenders: k,
            placements,
            access_sets: sets,
            decode,
            ack,
            timing: frame_timing(counts, c.t_sw, ack_mode),
            policy,
            ack_mode,
            reception,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub contenders: usize,
    pub placements: Vec<NodePlacement>,
    pub access_sets: Vec<AccessSet>,
    pub decode: DecodeResult,
    /// Absent when the frame has no ACK phase.
    pub ack: Option<AckOutcome>,
    pub timing: FrameTiming,
    pub policy: Policy,
    pub ack_mode: AckMode,
    pub reception: Option<SlotReception>,
}

impl FrameOutcome {
    /// UEs that completed the frame: ACKed, or decoded when there is no ACK.
    pub fn successes(&self) -> usize {
        match &self.ack {
            Some(a) => a.acked.len(),
            None => self.decode.decoded.len(),
        }
    }

    pub fn timing_at(&self, t_sw: f64) -> FrameTiming {
        frame_timing(self.timing.counts, t_sw, self.ack_mode)
    }
}
