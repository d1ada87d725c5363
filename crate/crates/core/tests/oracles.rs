use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use risra::access::{
    design_access_codebook, infer_ul, policy_gscap, policy_rrs_aloha, policy_smap, solve_x_tau,
    AccessOverflow, AccessSet, DecodeResult, Policy,
};
use risra::ack::{ack_received, design_ack_precoding, AckMode, AckNormalization};
use risra::channel::{array_factor, sample_ue_placement, Direction, RadioConstants, RisGeometry};
use risra::experiments::{estimate_metrics, read_rows, write_rows, MetricsRow, CSV_COLUMNS};
use risra::protocol::{frame_timing, FrameOutcome, PhaseCounts, Scenario, ScenarioConfig};
use risra::training::analyze_signal;

fn real(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

#[test]
fn smap_hand_example() {
    // predicted SNRs (10, 4, 3.5, 2) at unit transmit SNR
    let mags: Vec<f64> = [10.0f64, 4.0, 3.5, 2.0].iter().map(|s| s.sqrt()).collect();
    let s = policy_smap(&real(&mags), 1.0, 3.0).unwrap();
    assert_eq!(s.slots, vec![0, 2]);
}

#[test]
fn gscap_hand_example() {
    let s = policy_gscap(&real(&[0.1, 0.9, 0.4, 0.9]), 2).unwrap();
    assert_eq!(s.slots, vec![1, 3]);
}

#[test]
fn ack_detection_matches_chi_square_tail() {
    // zero signal: 2‖w‖²/σ² is χ² with 2L dof, so P = e^{-Lγ} Σ_{j<L} (Lγ)^j / j!
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 100_000;
    for (l, gamma) in [(1usize, 1.0f64), (3, 0.8), (8, 1.2)] {
        let x = l as f64 * gamma;
        let mut term = 1.0;
        let mut sum = 0.0;
        for j in 0..l {
            if j > 0 {
                term *= x / j as f64;
            }
            sum += term;
        }
        let expect = (-x).exp() * sum;
        let hits = (0..draws)
            .filter(|_| ack_received(&mut rng, Complex64::new(0.0, 0.0), 1.0, 2.0, l, gamma))
            .count();
        let p = hits as f64 / draws as f64;
        assert!(
            (p / expect - 1.0).abs() < 0.02,
            "L={l} γ={gamma}: {p} vs {expect}"
        );
    }
}

#[test]
fn rrs_marginals_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (n, r, draws) = (20, 4, 50_000);
    let mut counts = vec![0usize; n];
    for _ in 0..draws {
        for s in policy_rrs_aloha(&mut rng, n, r).unwrap().slots {
            counts[s] += 1;
        }
    }
    for c in counts {
        let f = c as f64 / draws as f64;
        assert!((f - r as f64 / n as f64).abs() < 0.01, "{f}");
    }
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn ue_placement_passes_ks() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (d_min, d_max, n) = (10.0, 100.0, 20_000);
    let ues: Vec<_> = (0..n)
        .map(|_| sample_ue_placement(&mut rng, d_min, d_max, 1.0).unwrap())
        .collect();
    // 1% critical value
    let crit = 1.63 / (n as f64).sqrt();
    let d = ks_statistic(ues.iter().map(|u| u.distance).collect(), |d| {
        (d * d - d_min * d_min) / (d_max * d_max - d_min * d_min)
    });
    let a = ks_statistic(ues.iter().map(|u| u.angle).collect(), |t| t / FRAC_PI_2);
    assert!(d < crit, "distance D = {d}");
    assert!(a < crit, "angle D = {a}");
}

#[test]
fn predicted_argmax_tracks_truth() {
    let base = ScenarioConfig::preset("fig5b").unwrap();
    let s = Scenario::new(ScenarioConfig {
        se_target: Some(1e-3),
        ..base
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (trials, mut hits) = (2000, 0);
    for _ in 0..trials {
        let ue =
            sample_ue_placement(&mut rng, s.config.d_min_m, s.config.d_max_m, s.gain_ue).unwrap();
        let model = s.train_ue(&mut rng, &ue).unwrap();
        let pred = infer_ul(&model, s.access.angles());
        let truth: Vec<Complex64> = s
            .access
            .angles()
            .iter()
            .map(|&t| s.response(&ue, t, Direction::Uplink))
            .collect();
        let best = policy_gscap(&truth, 1).unwrap().slots[0];
        let chosen = policy_gscap(&pred, 1).unwrap().slots[0];
        // a near-tie counts as a hit
        if truth[chosen].norm_sqr() >= 0.95 * truth[best].norm_sqr() {
            hits += 1;
        }
    }
    let f = hits as f64 / trials as f64;
    assert!(f >= 0.95, "fidelity {f}");
}

#[test]
fn precoding_angle_centres_on_the_sector() {
    let base = ScenarioConfig::preset("fig6").unwrap();
    let s = Scenario::new(ScenarioConfig {
        kappa: 100.0,
        ..base
    })
    .unwrap();
    let mut sum = 0.0;
    let mut n = 0;
    for t in 0..400 {
        let f = s
            .run_frame_with(Policy::Gscap, AckMode::Precoding, 3, t, false)
            .unwrap();
        if f.decode.decode_slots.is_empty() {
            continue;
        }
        let d = design_ack_precoding(
            &f.decode,
            s.access.angles(),
            AckNormalization::DecodedSlots,
            f.contenders,
        )
        .unwrap();
        sum += d.angles[0];
        n += 1;
    }
    let mean = sum / n as f64;
    assert!((mean - FRAC_PI_4).abs() < 0.02, "{mean}");
}

#[test]
fn access_codebook_keeps_minimum_gain() {
    let r = RadioConstants::from_frequency(3e9).unwrap();
    let g = RisGeometry::new(10, 10, r.wavelength / 2.0, r.wavelength / 2.0, &r).unwrap();
    for (tau, extra) in [(0.5, 0), (0.5, 7), (0.2, 0), (0.8, 3)] {
        let probe = design_access_codebook(&g, &r, FRAC_PI_4, tau, 1, AccessOverflow::Stretch);
        let bound = match probe {
            Err(risra::Error::BelowBound { bound, .. }) => bound,
            other => panic!("{other:?}"),
        };
        let d = design_access_codebook(
            &g,
            &r,
            FRAC_PI_4,
            tau,
            bound + extra,
            AccessOverflow::Stretch,
        )
        .unwrap();
        let m = g.m_x as f64;
        let worst = (0..=4000)
            .map(|i| i as f64 / 4000.0 * FRAC_PI_2)
            .map(|tk| {
                d.angles()
                    .iter()
                    .map(|&tr| (array_factor(&g, &r, tk, tr).norm() / (m * g.m_z as f64)).powi(2))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(
            worst >= tau * (1.0 - 1e-2),
            "τ={tau} N={}: {worst}",
            bound + extra
        );
        assert!(solve_x_tau(tau).unwrap() > 0.0);
    }
}

#[test]
fn fourier_coefficients_match_direct_quadrature() {
    let r = RadioConstants::from_frequency(3e9).unwrap();
    let g = RisGeometry::new(10, 10, r.wavelength / 2.0, r.wavelength / 2.0, &r).unwrap();
    let tk = 0.6;
    let a = analyze_signal(&g, &r, tk, 1e-3, 10_000).unwrap();
    let f0 = g.fundamental_frequency(&r);
    let signal = |t: f64| -> Complex64 {
        let u = 2.0 * PI * f0 * (tk.sin() - t.sin());
        (1..=g.m_x)
            .map(|m| Complex64::from_polar(1.0, m as f64 * u))
            .sum()
    };
    // composite Simpson over the support
    let n = 20_000;
    let h = FRAC_PI_2 / n as f64;
    let simpson = |f: &dyn Fn(f64) -> Complex64| -> Complex64 {
        (0..=n)
            .map(|k| {
                let w = if k == 0 || k == n {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                f(k as f64 * h) * w
            })
            .sum::<Complex64>()
            * (h / 3.0)
    };
    let power = simpson(&|t| Complex64::new(signal(t).norm_sqr(), 0.0)).re * f0;
    assert!(
        (power / a.power - 1.0).abs() < 1e-6,
        "{power} vs {}",
        a.power
    );
    for i in [-7i64, -1, 0, 2, 15] {
        let c = simpson(&|t| signal(t) * Complex64::from_polar(1.0, -2.0 * PI * f0 * i as f64 * t))
            * f0;
        assert!(
            (c - a.coefficient(i)).norm() < 1e-6 * a.power.sqrt(),
            "i={i}"
        );
    }
    let parseval = a.truncated_power(a.coefficient_cap);
    assert!((parseval / a.power - 1.0).abs() < 1e-3);
}

fn outcome(
    contenders: usize,
    decoded: Vec<usize>,
    acked: Option<Vec<usize>>,
    counts: PhaseCounts,
) -> FrameOutcome {
    let mode = if acked.is_some() {
        AckMode::Tdma
    } else {
        AckMode::None
    };
    FrameOutcome {
        contenders,
        placements: Vec::new(),
        access_sets: vec![AccessSet::default(); contenders],
        decode: DecodeResult {
            decoded,
            ..Default::default()
        },
        ack: acked.map(|a| risra::ack::AckOutcome {
            unsuccessful: (0..contenders).filter(|k| !a.contains(k)).collect(),
            acked: a,
        }),
        timing: frame_timing(counts, 0.0, mode),
        policy: Policy::Gscap,
        ack_mode: mode,
        reception: None,
    }
}

#[test]
fn metrics_hand_values() {
    // T = 20 + 40 + 0 symbols, three successes
    let counts = PhaseCounts {
        c_tr: 10,
        c_ac: 40,
        c_ack: 0,
        l_tr: 2,
        l_ac: 1,
        l_ack: 1,
    };
    let one = outcome(5, vec![0, 1, 2], None, counts);
    let e = estimate_metrics(std::slice::from_ref(&one), 0.0).unwrap();
    assert!((one.timing.total - 60.0).abs() < 1e-12);
    assert!((e.throughput_mean - 0.05).abs() < 1e-12);
    assert!((e.p_access_mean - 0.6).abs() < 1e-12);

    let all = outcome(
        3,
        vec![0, 1, 2],
        Some(vec![0, 1, 2]),
        PhaseCounts { c_ack: 3, ..counts },
    );
    let empty = outcome(0, vec![], None, counts);
    let e = estimate_metrics(&[all, empty], 0.0).unwrap();
    assert_eq!(e.p_access_mean, 1.0);
    assert_eq!(e.active_frames, 1);
    assert!(estimate_metrics(&[], 0.0).is_err());
}

fn frames(s: &Scenario, ack: AckMode, n: u64) -> Vec<FrameOutcome> {
    (0..n)
        .map(|t| s.run_frame_with(Policy::Gscap, ack, 17, t, false).unwrap())
        .collect()
}

#[test]
fn acknowledgement_only_loses_access() {
    let base = ScenarioConfig::preset("fig6").unwrap();
    let s = Scenario::new(ScenarioConfig {
        kappa: 50.0,
        ..base
    })
    .unwrap();
    let none = frames(&s, AckMode::None, 300);
    let pre = frames(&s, AckMode::Precoding, 300);
    for (a, b) in none.iter().zip(&pre) {
        assert_eq!(a.decode, b.decode);
        assert!(b.successes() <= a.successes());
    }
    let p_none = estimate_metrics(&none, 0.0).unwrap().p_access_mean;
    let p_pre = estimate_metrics(&pre, 0.0).unwrap().p_access_mean;
    assert!(p_pre <= p_none);
}

#[test]
fn confidence_interval_shrinks_with_trials() {
    let base = ScenarioConfig::preset("fig6").unwrap();
    let s = Scenario::new(ScenarioConfig {
        kappa: 10.0,
        ..base
    })
    .unwrap();
    let all = frames(&s, AckMode::None, 10_000);
    let small = estimate_metrics(&all[..100], 0.0).unwrap().throughput_ci95;
    let large = estimate_metrics(&all, 0.0).unwrap().throughput_ci95;
    let ratio = small / large;
    assert!((ratio / 10.0 - 1.0).abs() < 0.25, "{ratio}");
}

#[test]
fn csv_round_trip_keeps_nine_digits() {
    let row = MetricsRow {
        preset: "fig6".into(),
        kappa: 50.0,
        policy: "gscap".into(),
        ack_mode: "tdma".into(),
        t_sw: 1.0,
        se_target: Some(1e-3),
        n_tr: 46,
        n_ac: 50,
        trials: 10,
        p_access_mean: Some(1.0 / 3.0),
        p_access_ci95: Some(0.0123456789123),
        throughput_mean: Some(PI),
        throughput_ci95: None,
        se_mean: None,
        seed: u64::MAX,
    };
    let mut buf = Vec::new();
    write_rows(
        &mut buf,
        &["seed = 1".to_string()],
        std::slice::from_ref(&row),
    )
    .unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# seed = 1"));
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    assert!(text.contains("0.333333333,"));
    assert!(text.contains("3.14159265,"));
    let back = read_rows(buf.as_slice()).unwrap();
    assert_eq!(back.len(), 1);
    let b = &back[0];
    assert_eq!(b.seed, u64::MAX);
    assert_eq!(b.throughput_ci95, None);
    assert!((b.p_access_mean.unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((b.throughput_mean.unwrap() / PI - 1.0).abs() < 1e-8);
}

#[test]
fn short_spatial_period_is_rejected() {
    let r = RadioConstants::from_frequency(3e9).unwrap();
    let g = RisGeometry::new(10, 10, r.wavelength, r.wavelength, &r).unwrap();
    assert!(matches!(
        analyze_signal(&g, &r, 0.3, 1e-2, 10_000),
        Err(risra::Error::InvalidParameter { name: "d_x", .. })
    ));
}
