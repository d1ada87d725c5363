//! Monte Carlo sweeps for the figure presets.
//!
//! Each preset expands into a grid of points. Trials of a point run on the
//! rayon pool, but every trial draws from its own seeded streams and results
//! are reduced in trial order, so output does not depend on thread count.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::access::Policy;
use crate::ack::AckMode;
use crate::channel::{sample_ue_placement, Direction};
use crate::error::{Error, Result};
use crate::experiments::metrics::{estimate_metrics, MetricsRow};
use crate::protocol::{trial_rng, FrameOutcome, NtrMode, Scenario, ScenarioConfig, Stream};
use crate::training::normalized_expected_se;

/// Channel loads swept by `fig5b` and `fig6`.
pub const KAPPA_GRID: [f64; 7] = [10.0, 25.0, 50.0, 75.0, 100.0, 150.0, 200.0];
pub const SE_GRID: [f64; 3] = [0.0, 1e-3, 1e-2];
/// Training sizes compared by `fig5a`.
pub const NTR_GRID: [usize; 4] = [16, 46, 142, 150];
pub const TSW_GRID: [f64; 3] = [0.0, 1.0, 5.0];
/// Angles at which `fig5a` compares reconstructions with the true channel.
pub const SE_EVAL_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Normalized reconstruction error per (SE target, N_tr).
    Reconstruction,
    /// Access probability and throughput per (κ, SE, policy, ACK, T_sw).
    Access,
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub preset: String,
    pub kind: SweepKind,
    pub base: ScenarioConfig,
    pub kappas: Vec<f64>,
    pub se_targets: Vec<Option<f64>>,
    pub n_trs: Vec<usize>,
    pub policies: Vec<Policy>,
    pub ack_modes: Vec<AckMode>,
    pub t_sws: Vec<f64>,
}

impl SweepPlan {
    /// Expand a preset. `base` is the preset config after user overrides;
    /// any axis whose key appears in `pinned` collapses to the value in
    /// `base`.
    pub fn for_preset<S: AsRef<str>>(
        preset: &str,
        base: ScenarioConfig,
        pinned: &[S],
    ) -> Result<Self> {
        let mut plan = Self {
            preset: preset.to_string(),
            kind: SweepKind::Access,
            kappas: vec![base.kappa],
            se_targets: vec![base.se_target],
            n_trs: vec![base.n_tr],
            policies: vec![base.policy],
            ack_modes: vec![base.ack_mode],
            t_sws: vec![base.t_sw],
            base,
        };
        let all_acks = vec![AckMode::None, AckMode::Precoding, AckMode::Tdma];
        let se_grid: Vec<Option<f64>> = SE_GRID.iter().map(|&s| Some(s)).collect();
        match preset {
            "table1" | "fig4" => {}
            "fig5a" => {
                plan.kind = SweepKind::Reconstruction;
                plan.se_targets = se_grid;
                plan.n_trs = NTR_GRID.to_vec();
            }
            "fig5b" => {
                plan.kappas = KAPPA_GRID.to_vec();
                plan.se_targets = se_grid;
                plan.policies = Policy::ALL.to_vec();
            }
            "fig6" => {
                plan.kappas = KAPPA_GRID.to_vec();
                plan.policies = Policy::ALL.to_vec();
                plan.ack_modes = all_acks;
            }
            "fig7" => {
                plan.policies = vec![Policy::Gscap];
                plan.ack_modes = all_acks;
                plan.t_sws = TSW_GRID.to_vec();
            }
            other => return Err(Error::Config(format!("unknown preset `{other}`"))),
        }
        let b = &plan.base;
        for key in pinned.iter().map(AsRef::as_ref) {
            match key {
                "kappa" => plan.kappas = vec![b.kappa],
                "se_target" => plan.se_targets = vec![b.se_target],
                "n_tr" => plan.n_trs = vec![b.n_tr],
                "policy" => plan.policies = vec![b.policy],
                "ack_mode" => plan.ack_modes = vec![b.ack_mode],
                "t_sw" => plan.t_sws = vec![b.t_sw],
                _ => {}
            }
        }
        if plan.kind == SweepKind::Reconstruction && b.n_tr_mode != NtrMode::Fixed {
            plan.n_trs = vec![0];
        }
        Ok(plan)
    }
}

pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<MetricsRow>> {
    match plan.kind {
        SweepKind::Reconstruction => run_reconstruction(plan),
        SweepKind::Access => run_access(plan),
    }
}

fn run_reconstruction(plan: &SweepPlan) -> Result<Vec<MetricsRow>> {
    let b = &plan.base;
    let grid: Vec<f64> = (0..SE_EVAL_POINTS)
        .map(|i| FRAC_PI_2 * i as f64 / (SE_EVAL_POINTS - 1) as f64)
        .collect();
    let mut rows = Vec::new();
    for &se in &plan.se_targets {
        for &n_tr in &plan.n_trs {
            let mut cfg = b.clone();
            cfg.se_target = se;
            if n_tr > 0 {
                cfg.n_tr = n_tr;
            }
            let scenario = Scenario::new(cfg)?;
            let per_trial = (0..b.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(b.seed, t, Stream::Load);
                    let ue = sample_ue_placement(&mut rng, b.d_min_m, b.d_max_m, scenario.gain_ue)?;
                    let mut rng_tr = trial_rng(b.seed, t, Stream::Training);
                    let model = scenario.train_ue(&mut rng_tr, &ue)?;
                    let truth: Vec<Complex64> = grid
                        .iter()
                        .map(|&th| scenario.response(&ue, th, Direction::Downlink))
                        .collect();
                    normalized_expected_se(std::slice::from_ref(&model), &truth, &grid)
                })
                .collect::<Result<Vec<f64>>>()?;
            let se_mean = per_trial.iter().sum::<f64>() / per_trial.len().max(1) as f64;
            rows.push(MetricsRow {
                preset: plan.preset.clone(),
                kappa: b.kappa,
                policy: String::new(),
                ack_mode: String::new(),
                t_sw: b.t_sw,
                se_target: se,
                n_tr: scenario.n_tr(),
                n_ac: scenario.n_ac(),
                trials: b.trials,
                p_access_mean: None,
                p_access_ci95: None,
                throughput_mean: None,
                throughput_ci95: None,
                se_mean: Some(se_mean),
                seed: b.seed,
            });
        }
    }
    Ok(rows)
}

fn run_access(plan: &SweepPlan) -> Result<Vec<MetricsRow>> {
    let b = &plan.base;
    if b.trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let mut rows = Vec::new();
    for &kappa in &plan.kappas {
        for (si, &se) in plan.se_targets.iter().enumerate() {
            let mut cfg = b.clone();
            cfg.kappa = kappa;
            cfg.se_target = se;
            let scenario = Scenario::new(cfg)?;
            for &policy in &plan.policies {
                // the random baseline has no training, so one SE value suffices
                if !policy.uses_oracle() && si > 0 {
                    continue;
                }
                for &ack_mode in &plan.ack_modes {
                    let outcomes = (0..b.trials as u64)
                        .into_par_iter()
                        .map(|t| scenario.run_frame_with(policy, ack_mode, b.seed, t, false))
                        .collect::<Result<Vec<FrameOutcome>>>()?;
                    for &t_sw in &plan.t_sws {
                        let est = estimate_metrics(&outcomes, t_sw)?;
                        rows.push(MetricsRow {
                            preset: plan.preset.clone(),
                            kappa,
                            policy: policy.name().to_string(),
                            ack_mode: ack_mode.name().to_string(),
                            t_sw,
                            se_target: if policy.uses_oracle() { se } else { None },
                            n_tr: if policy.uses_oracle() {
                                scenario.n_tr()
                            } else {
                                0
                            },
                            n_ac: scenario.n_ac(),
                            trials: b.trials,
                            p_access_mean: Some(est.p_access_mean),
                            p_access_ci95: Some(est.p_access_ci95),
                            throughput_mean: Some(est.throughput_mean),
                            throughput_ci95: Some(est.throughput_ci95),
                            se_mean: None,
                            seed: b.seed,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}
