use std::process::{Command, Output};

use risra::experiments::read_rows;
use risra::protocol::{Scenario, ScenarioConfig};
use risra::training::{codebook_statistics, uniform_theta_grid, DEFAULT_GRID_POINTS};

fn risra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_risra"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> (String, String) {
    let o = risra(args);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(o.status.success(), "{args:?}: {err}");
    (String::from_utf8(o.stdout).unwrap(), err)
}

#[test]
fn single_training_configuration_points_at_broadside() {
    let (out, err) = ok(&["codebook", "train", "--n", "1"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("n,theta_rad,"));
    let theta: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(theta, 0.0);
    assert!(err.contains("N_tr = 1"));
}

#[test]
fn access_codebook_reports_bound() {
    let (out, err) = ok(&["codebook", "access", "--preset", "table1"]);
    assert!(err.contains("N_ac bound 12"), "{err}");
    assert_eq!(out.lines().count(), 51);
}

#[test]
fn training_statistic_matches_library() {
    let (_, err) = ok(&[
        "codebook",
        "train",
        "--preset",
        "fig4",
        "--stat",
        "median",
        "--epsilon",
        "1e-2",
    ]);
    let s = Scenario::new(ScenarioConfig::preset("fig4").unwrap()).unwrap();
    let st = codebook_statistics(
        &s.geom,
        &s.radio,
        1e-2,
        &uniform_theta_grid(DEFAULT_GRID_POINTS),
    )
    .unwrap();
    assert!(
        err.contains(&format!("N_tr = {} (median", st.median_bound)),
        "{err}"
    );
}

#[test]
fn sweeps_are_reproducible_across_threads() {
    let base = [
        "sweep", "--preset", "fig7", "--trials", "200", "--seed", "7",
    ];
    let (a, _) = ok(&base);
    let (b, _) = ok(&base);
    let (c, _) = ok(&[&base[..], &["--threads", "1"]].concat());
    let (d, _) = ok(&[&base[..], &["--threads", "3"]].concat());
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a, d);
    let rows = read_rows(a.as_bytes()).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.seed == 7 && r.trials == 200));
    assert!(a.contains("# seed: 7"));
}

#[test]
fn override_pins_the_sweep_axis() {
    let (out, _) = ok(&[
        "sweep",
        "--preset",
        "fig6",
        "--trials",
        "20",
        "--override",
        "policy=gscap",
    ]);
    let rows = read_rows(out.as_bytes()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.policy == "gscap"));
    let kappas: std::collections::BTreeSet<u64> = rows.iter().map(|r| r.kappa as u64).collect();
    assert_eq!(kappas.len(), 7);
}

#[test]
fn reconstruction_sweep_fills_se_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5a.csv");
    ok(&[
        "sweep",
        "--preset",
        "fig5a",
        "--trials",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    let rows = risra::experiments::read_csv(&path).unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows
        .iter()
        .all(|r| r.se_mean.is_some() && r.p_access_mean.is_none()));
}

#[test]
fn exit_codes() {
    let o = risra(&["run", "--override", "no_such_key=1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = risra(&[
        "codebook",
        "train",
        "--preset",
        "fig4",
        "--stat",
        "max",
        "--epsilon",
        "1e-9",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = risra(&["run", "--config", "/nonexistent/risra.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let o = risra(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_trace_mentions_seed_and_noise() {
    let (out, _) = ok(&["run", "--preset", "fig6", "--seed", "42", "--trial", "3"]);
    assert!(out.contains("# seed = 42, trial = 3"));
    assert!(out.contains("noise_dbm = -75"));
    assert!(out.contains("contenders K = "));
    let (out, _) = ok(&["run", "--override", "kappa=1e-12"]);
    assert!(out.contains("contenders K = 0"));
}

#[test]
fn run_writes_frame_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("frame.csv");
    ok(&["run", "--preset", "fig6", "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text
        .lines()
        .any(|l| l == "ue,distance_m,theta_rad,slots,decode_slot,acked"));
}

#[test]
fn config_file_merges_under_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "kappa = 30.0\ntau = 0.8\n").unwrap();
    let (out, _) = ok(&["analyze", "--config", path.to_str().unwrap()]);
    let n_ac = |s: &str| {
        s.lines()
            .find_map(|l| l.strip_prefix("n_ac = "))
            .unwrap()
            .to_string()
    };
    assert_eq!(n_ac(&out), "30");
    let (out, _) = ok(&[
        "analyze",
        "--config",
        path.to_str().unwrap(),
        "--override",
        "kappa=40",
    ]);
    assert_eq!(n_ac(&out), "40");
}
