use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use risra::access::{expected_ul_pathloss, min_ue_power, solve_x_tau};
use risra::ack::design_ack_precoding;
use risra::channel::{beam_widths, far_field_min_distance, Direction};
use risra::codebook::{Codebook, CodebookKind};
use risra::experiments::{run_sweep, write_rows, SweepPlan};
use risra::math::{db_to_linear, linear_to_db, watts_to_dbm};
use risra::protocol::{FrameOutcome, Scenario, ScenarioConfig};
use risra::training::{
    codebook_statistics, training_angles, uniform_theta_grid, DEFAULT_GRID_POINTS,
};

const BUILD_ID: &str = env!("RISRA_BUILD_ID");
const NOISE_NOTE: &str = "noise_dbm defaults to -94 dBm, taken from a companion parameter table; \
                          the figure presets use their own calibrated value";

#[derive(Parser)]
#[command(
    name = "risra",
    version,
    about = "Grant-free random access through a reconfigurable intelligent surface"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a codebook as CSV and a summary line on stderr.
    Codebook {
        #[arg(value_enum)]
        kind: CodebookArg,
        /// Number of configurations; overrides the scenario and `--stat`.
        #[arg(long)]
        n: Option<usize>,
        /// Power-leakage tolerance for `--stat`.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Size the training codebook from bandwidth statistics.
        #[arg(long, value_enum)]
        stat: Option<StatArg>,
        /// Decoded access slots for `ack-precoding`, comma separated.
        #[arg(long, value_delimiter = ',')]
        slots: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate one frame and print a trace.
    Run {
        /// Trial index within the seed.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a preset sweep and write CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Print derived quantities of a scenario.
    Analyze {
        /// Also compute training-size statistics at this tolerance.
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CodebookArg {
    Train,
    Access,
    AckPrecoding,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Median,
    Max,
    Taylor,
}

#[derive(Args)]
struct Common {
    /// TOML scenario file, applied on top of the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset (table1, fig4, fig5a, fig5b, fig6, fig7).
    #[arg(long)]
    preset: Option<String>,
    /// KEY=VALUE applied last; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::preset(self.preset.as_deref().unwrap_or("table1"))?;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            cfg = cfg.merged_toml(&text)?;
        }
        cfg = cfg.with_overrides(&self.overrides)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        Ok(cfg)
    }

    fn pinned_keys(&self) -> Vec<String> {
        self.overrides
            .iter()
            .filter_map(|o| o.split_once('=').map(|(k, _)| k.trim().to_string()))
            .collect()
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn install_threads(&self) -> Result<()> {
        if let Some(n) = self.threads {
            if n == 0 {
                bail!(risra::Error::Config("--threads must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<risra::Error>() {
        Some(risra::Error::NonConvergence { .. }) => 3,
        Some(risra::Error::Io(_)) | Some(risra::Error::Csv(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Codebook {
            kind,
            n,
            epsilon,
            stat,
            slots,
            common,
        } => cmd_codebook(kind, n, epsilon, stat, &slots, &common),
        Command::Run { trial, common } => cmd_run(trial, &common),
        Command::Sweep { common } => cmd_sweep(&common),
        Command::Analyze { epsilon, common } => cmd_analyze(epsilon, &common),
    }
}

fn warn(scenario: &Scenario) {
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_codebook(
    kind: CodebookArg,
    n: Option<usize>,
    epsilon: Option<f64>,
    stat: Option<StatArg>,
    slots: &[usize],
    common: &Common,
) -> Result<()> {
    common.install_threads()?;
    let mut cfg = common.config()?;
    if let (CodebookArg::Access, Some(n)) = (kind, n) {
        cfg.n_ac = Some(n);
    }
    let scenario = Scenario::new(cfg)?;
    warn(&scenario);
    let s = &scenario;
    let theta_a = s.config.theta_ap_deg.to_radians();
    let (codebook, summary) = match kind {
        CodebookArg::Train => {
            let (n_tr, how) = match (n, stat) {
                (Some(n), _) => (n, "explicit".to_string()),
                (None, Some(stat)) => {
                    let eps = epsilon.unwrap_or(s.config.epsilon);
                    let st = codebook_statistics(
                        &s.geom,
                        &s.radio,
                        eps,
                        &uniform_theta_grid(DEFAULT_GRID_POINTS),
                    )?;
                    let (n, name) = match stat {
                        StatArg::Median => (st.median_bound, "median"),
                        StatArg::Max => (st.max_bound, "max"),
                        StatArg::Taylor => (st.taylor_bound, "taylor"),
                    };
                    (
                        n,
                        format!(
                            "{name} bound at epsilon = {eps}; median {} max {} taylor {}",
                            st.median_bound, st.max_bound, st.taylor_bound
                        ),
                    )
                }
                (None, None) => (s.n_tr(), "scenario".to_string()),
            };
            if n_tr == 0 {
                bail!(risra::Error::Config(
                    "training codebook needs n >= 1".into()
                ));
            }
            let cb = Codebook::from_angles(
                CodebookKind::Training,
                &s.geom,
                &s.radio,
                theta_a,
                training_angles(n_tr),
                Direction::Downlink,
            )?;
            (cb, format!("N_tr = {n_tr} ({how}); L_tr = {}", s.l_tr))
        }
        CodebookArg::Access => {
            let a = &s.access;
            let summary = format!(
                "N_ac = {}; N_ac bound {} (tau = {}, x_tau = {:.6}); min gain {:.6}",
                a.len(),
                a.lower_bound,
                s.config.tau,
                a.gain_abscissa,
                a.min_gain
            );
            (a.codebook.clone(), summary)
        }
        CodebookArg::AckPrecoding => {
            let decode = if slots.is_empty() {
                let frame = s.run_frame(s.config.seed, 0)?;
                frame.decode
            } else {
                let mut decode_slots = slots.to_vec();
                decode_slots.sort_unstable();
                decode_slots.dedup();
                risra::access::DecodeResult {
                    decode_slots,
                    ..Default::default()
                }
            };
            if let Some(&bad) = decode.decode_slots.iter().find(|&&n| n >= s.n_ac()) {
                bail!(risra::Error::Config(format!(
                    "slot {bad} outside 0..{}",
                    s.n_ac()
                )));
            }
            let design =
                design_ack_precoding(&decode, s.access.angles(), s.config.ack_normalization, 0)?;
            let cb = Codebook::from_angles(
                CodebookKind::Ack,
                &s.geom,
                &s.radio,
                theta_a,
                design.angles.clone(),
                Direction::Downlink,
            )?;
            let summary = format!(
                "ACK precoding angle {:.6} rad from decode slots {:?}",
                design.angles[0], decode.decode_slots
            );
            (cb, summary)
        }
    };
    let mut out = common.output()?;
    codebook.write_csv(&mut out)?;
    out.flush()?;
    eprintln!("{summary}");
    Ok(())
}

fn cmd_run(trial: u64, common: &Common) -> Result<()> {
    let cfg = common.config()?;
    let scenario = Scenario::new(cfg)?;
    warn(&scenario);
    let c = &scenario.config;
    let frame = scenario.run_frame_with(c.policy, c.ack_mode, c.seed, trial, true)?;
    let mut stdout = io::stdout().lock();
    print_trace(&mut stdout, &scenario, &frame, trial)?;
    if let Some(path) = &common.out {
        let mut f = BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        write_frame_record(&mut f, &scenario, &frame, trial)?;
        f.flush()?;
    }
    Ok(())
}

fn print_trace(out: &mut impl Write, s: &Scenario, f: &FrameOutcome, trial: u64) -> io::Result<()> {
    let c = &s.config;
    writeln!(out, "# {BUILD_ID}")?;
    writeln!(out, "# seed = {}, trial = {trial}", c.seed)?;
    writeln!(out, "# {NOISE_NOTE}; noise_dbm = {}", c.noise_dbm)?;
    writeln!(
        out,
        "policy {} | ack {} | N_tr {} | L_tr {} | N_ac {} | kappa {}",
        f.policy.name(),
        f.ack_mode.name(),
        s.n_tr(),
        s.l_tr,
        s.n_ac(),
        c.kappa
    )?;
    writeln!(out, "contenders K = {}", f.contenders)?;
    for (k, (ue, set)) in f.placements.iter().zip(&f.access_sets).enumerate() {
        let decoded = f.decode.slot_of.get(&k);
        let acked = f.ack.as_ref().map(|a| a.acked.contains(&k));
        writeln!(
            out,
            "  ue {k:>3}: d = {:7.2} m, theta = {:6.2} deg, slots {:?}, decoded {}, acked {}",
            ue.distance,
            ue.angle.to_degrees(),
            set.slots,
            decoded.map_or("no".to_string(), |n| format!("at slot {n}")),
            acked.map_or("-", |a| if a { "yes" } else { "no" })
        )?;
    }
    if let Some(rx) = &f.reception {
        for (n, ues) in rx
            .contenders
            .iter()
            .enumerate()
            .filter(|(_, u)| !u.is_empty())
        {
            let p = rx.signals[n].iter().map(|z| z.norm_sqr()).sum::<f64>()
                / rx.signals[n].len() as f64;
            writeln!(
                out,
                "  slot {n:>3}: contenders {ues:?}, rx power {:.2} dBm",
                watts_to_dbm(p)
            )?;
        }
    }
    let t = &f.timing;
    writeln!(
        out,
        "decoded {} | successes {} | T_tr {} T_ac {} T_ack {} T {}",
        f.decode.decoded.len(),
        f.successes(),
        t.t_tr,
        t.t_ac,
        t.t_ack,
        t.total
    )
}

fn write_frame_record(
    out: &mut impl Write,
    s: &Scenario,
    f: &FrameOutcome,
    trial: u64,
) -> io::Result<()> {
    writeln!(out, "# {BUILD_ID}")?;
    writeln!(out, "# seed = {}, trial = {trial}", s.config.seed)?;
    for line in s.config.describe() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "ue,distance_m,theta_rad,slots,decode_slot,acked")?;
    for (k, (ue, set)) in f.placements.iter().zip(&f.access_sets).enumerate() {
        let slots: Vec<String> = set.slots.iter().map(|n| n.to_string()).collect();
        let decode = f
            .decode
            .slot_of
            .get(&k)
            .map(|n| n.to_string())
            .unwrap_or_default();
        let acked = match &f.ack {
            Some(a) => (a.acked.contains(&k) as u8).to_string(),
            None => String::new(),
        };
        writeln!(
            out,
            "{k},{:.9},{:.9},{},{decode},{acked}",
            ue.distance,
            ue.angle,
            slots.join(";")
        )?;
    }
    Ok(())
}

fn cmd_sweep(common: &Common) -> Result<()> {
    common.install_threads()?;
    let Some(preset) = common.preset.as_deref() else {
        bail!(risra::Error::Config("sweep needs --preset".into()));
    };
    let cfg = common.config()?;
    let plan = SweepPlan::for_preset(preset, cfg.clone(), &common.pinned_keys())?;
    let rows = run_sweep(&plan)?;
    let mut comments = vec![
        format!("build: {BUILD_ID}"),
        format!("preset: {preset}"),
        format!("seed: {}", cfg.seed),
        NOISE_NOTE.to_string(),
    ];
    comments.extend(cfg.describe().into_iter().map(|l| format!("config: {l}")));
    let mut out = common.output()?;
    write_rows(&mut out, &comments, &rows)?;
    out.flush()?;
    Ok(())
}

fn cmd_analyze(epsilon: Option<f64>, common: &Common) -> Result<()> {
    common.install_threads()?;
    let cfg = common.config()?;
    let s = Scenario::new(cfg)?;
    warn(&s);
    let c = &s.config;
    let mut out = common.output()?;
    let f0 = s.geom.fundamental_frequency(&s.radio);
    let x_tau = solve_x_tau(c.tau)?;
    let bw = beam_widths(&s.geom, &s.radio, solve_x_tau(0.5)?);
    let e_ul = expected_ul_pathloss(
        &s.geom, s.ap.gain, s.gain_ue, c.d_ap_m, c.d_min_m, c.d_max_m,
    )?;
    let rho_min = min_ue_power(e_ul, s.geom.elements(), s.gamma_ac, c.tau, s.sigma2)?;
    writeln!(out, "# {BUILD_ID}")?;
    writeln!(out, "wavelength_m = {}", s.radio.wavelength)?;
    writeln!(out, "elements = {}", s.geom.elements())?;
    writeln!(out, "fundamental_frequency = {f0}")?;
    writeln!(
        out,
        "far_field_min_distance_m = {}",
        far_field_min_distance(&s.geom, &s.radio)
    )?;
    writeln!(out, "x_tau = {x_tau}")?;
    writeln!(out, "access_lower_bound = {}", s.access.lower_bound)?;
    writeln!(out, "n_ac = {}", s.n_ac())?;
    writeln!(out, "n_tr = {}", s.n_tr())?;
    writeln!(out, "l_tr = {}", s.l_tr)?;
    writeln!(out, "fnbw_sine = {}", bw.fnbw)?;
    writeln!(out, "hpbw_sine = {}", bw.hpbw)?;
    writeln!(out, "coverage_count = {}", bw.coverage_count)?;
    writeln!(out, "expected_ul_pathloss = {e_ul}")?;
    writeln!(out, "expected_ul_pathloss_db = {}", linear_to_db(e_ul))?;
    writeln!(out, "min_ue_power_dbm = {}", watts_to_dbm(rho_min))?;
    let best_ul = c.rho_ue_dbm - c.noise_dbm
        + linear_to_db(e_ul.max(f64::MIN_POSITIVE))
        + linear_to_db((s.geom.elements() * s.geom.elements()) as f64);
    writeln!(out, "mean_peak_ul_snr_db = {best_ul}")?;
    writeln!(out, "gamma_ac = {}", db_to_linear(c.gamma_ac_db))?;
    if let Some(eps) = epsilon {
        let st = codebook_statistics(
            &s.geom,
            &s.radio,
            eps,
            &uniform_theta_grid(DEFAULT_GRID_POINTS),
        )?;
        writeln!(out, "epsilon = {eps}")?;
        writeln!(out, "median_fmax = {}", st.median_fmax)?;
        writeln!(out, "max_fmax = {}", st.max_fmax)?;
        writeln!(out, "taylor_fmax = {}", st.taylor_fmax)?;
        writeln!(out, "median_bound = {}", st.median_bound)?;
        writeln!(out, "max_bound = {}", st.max_bound)?;
        writeln!(out, "taylor_bound = {}", st.taylor_bound)?;
    }
    out.flush()?;
    Ok(())
}
