//! Scenario parameters, named presets and `key=value` overrides.

use serde::{Deserialize, Serialize};

use crate::access::{AccessOverflow, Policy};
use crate::ack::{AckMode, AckNormalization};
use crate::error::{Error, Result};
use crate::training::Kernel;

/// How the training codebook size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NtrMode {
    /// Use `n_tr` as given.
    #[default]
    Fixed,
    /// Median bandwidth bound over the angle grid at `epsilon`.
    Median,
    Max,
    Taylor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    /// Every UE transmits at `rho_ue_dbm`.
    #[default]
    Fixed,
    /// Minimum power meeting `gamma_ac` at gain `tau` for the average pathloss.
    Policy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub carrier_frequency_hz: f64,
    pub m_x: usize,
    pub m_z: usize,
    pub d_x_wavelengths: f64,
    pub d_z_wavelengths: f64,
    pub d_max_m: f64,
    pub d_min_m: f64,
    pub gain_ap_db: f64,
    pub gain_ue_db: f64,
    pub rho_ap_dbm: f64,
    pub rho_ue_dbm: f64,
    pub gamma_ac_db: f64,
    pub gamma_ack_db: f64,
    pub l_ac: usize,
    pub l_ack: usize,
    pub r_replicas: usize,
    pub theta_ap_deg: f64,
    pub d_ap_m: f64,
    pub t_sw: f64,
    pub noise_dbm: f64,
    pub policy: Policy,
    pub ack_mode: AckMode,
    pub n_tr_mode: NtrMode,
    pub n_tr: usize,
    pub epsilon: f64,
    /// Target normalized reconstruction error; when unset the training
    /// phase uses the physical noise with `l_tr` or `delta_tol`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_tr: Option<usize>,
    /// Access slots; defaults to `max(round(kappa), bound)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_ac: Option<usize>,
    pub kappa: f64,
    pub trials: usize,
    pub seed: u64,
    pub tau: f64,
    pub kernel: Kernel,
    pub power_mode: PowerMode,
    pub ack_normalization: AckNormalization,
    pub access_overflow: AccessOverflow,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            carrier_frequency_hz: 3e9,
            m_x: 10,
            m_z: 10,
            d_x_wavelengths: 1.0,
            d_z_wavelengths: 1.0,
            d_max_m: 100.0,
            d_min_m: 5.0,
            gain_ap_db: 5.0,
            gain_ue_db: 5.0,
            rho_ap_dbm: 20.0,
            rho_ue_dbm: 10.0,
            gamma_ac_db: 3.0,
            gamma_ack_db: 3.0,
            l_ac: 1,
            l_ack: 1,
            r_replicas: 1,
            theta_ap_deg: 45.0,
            d_ap_m: 5.0,
            t_sw: 0.0,
            noise_dbm: -94.0,
            policy: Policy::Gscap,
            ack_mode: AckMode::Tdma,
            n_tr_mode: NtrMode::Fixed,
            n_tr: 46,
            epsilon: 1e-3,
            se_target: None,
            delta_tol: None,
            l_tr: None,
            n_ac: None,
            kappa: 50.0,
            trials: 1000,
            seed: 1,
            tau: 0.5,
            kernel: Kernel::Spline,
            power_mode: PowerMode::Fixed,
            ack_normalization: AckNormalization::DecodedSlots,
            access_overflow: AccessOverflow::Stretch,
        }
    }
}

/// Noise power used by the figure presets. The strongest uplink link (UE at
/// `d_min`, broadside) then sees about 45 dB received SNR, while a UE at
/// `d_max` served by a random configuration is usually below `gamma_ac`.
pub const FIGURE_NOISE_DBM: f64 = -75.0;

pub const PRESETS: [&str; 6] = ["table1", "fig4", "fig5a", "fig5b", "fig6", "fig7"];

impl ScenarioConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self::default();
        let cfg = match name {
            "table1" => base,
            "fig4" => Self {
                d_x_wavelengths: 0.5,
                d_z_wavelengths: 0.5,
                ..base
            },
            "fig5a" => Self {
                d_x_wavelengths: 0.5,
                d_z_wavelengths: 0.5,
                se_target: Some(0.0),
                trials: 200,
                ..base
            },
            "fig5b" => Self {
                ack_mode: AckMode::None,
                noise_dbm: FIGURE_NOISE_DBM,
                se_target: Some(1e-3),
                ..base
            },
            "fig6" => Self {
                noise_dbm: FIGURE_NOISE_DBM,
                se_target: Some(1e-3),
                ..base
            },
            "fig7" => Self {
                noise_dbm: FIGURE_NOISE_DBM,
                se_target: Some(1e-3),
                kappa: 100.0,
                ..base
            },
            other => return Err(Error::Config(format!("unknown preset `{other}`"))),
        };
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("config serializes to a table")
    }

    /// Layer a TOML table on top of `self`; unknown keys are rejected.
    pub fn merged(&self, overlay: &toml::Table) -> Result<Self> {
        let mut table = self.to_toml_table();
        for (k, v) in overlay {
            table.insert(k.clone(), v.clone());
        }
        table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    /// Layer the keys of a TOML document on top of `self`.
    pub fn merged_toml(&self, text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        self.merged(&table)
    }

    /// Apply `key=value` strings. Values are read as TOML literals and fall
    /// back to plain strings, so `policy=gscap` and `kappa=50` both work.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut overlay = toml::Table::new();
        for raw in overrides {
            let raw = raw.as_ref();
            let (key, value) = raw
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{raw}` is not KEY=VALUE")))?;
            let key = key.trim();
            let value = value.trim();
            let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(value.to_string()));
            overlay.insert(key.to_string(), parsed);
        }
        self.merged(&overlay)
    }

    /// Resolved parameters as sorted `key = value` lines.
    pub fn describe(&self) -> Vec<String> {
        self.to_toml_table()
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect()
    }
}
