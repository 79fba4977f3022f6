use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lzslab_cli::commands::{self, Options};
use lzslab_cli::config::{FieldGrid, Job, LzPopulations, RunConfig, Waveguide};
use lzslab_cli::output::{Series, SweepResult};
use lzslab_cli::presets;

fn lzslab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lzslab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("LZSLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lzslab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn small_lz(delta_primes: Vec<f64>) -> RunConfig {
    RunConfig::new(
        Job::LzPopulations(LzPopulations {
            delta: 9.0 / 32.0,
            delta_primes,
            z_min: 20.0,
            z_max: 40.0,
            points: 21,
            basis: lzslab::twolevel::Basis::Adiabatic,
            log_grid: true,
        }),
        "lz.csv",
    )
}

#[test]
fn every_preset_round_trips() {
    for name in presets::NAMES {
        let cfg = presets::preset(name).unwrap();
        let json = cfg.to_json();
        let back = RunConfig::from_json(&json).unwrap();
        assert_eq!(back, cfg, "{name}");
        assert_eq!(back.to_json(), json, "{name}");
    }
}

#[test]
fn emit_config_then_load_is_identical() {
    let dir = scratch("emit");
    let first = lzslab(&["--preset", "waveguide-com", "--emit-config"], &dir);
    assert!(first.status.success());
    let path = dir.join("cfg.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let second = lzslab(&["--config", path.to_str().unwrap(), "--emit-config"], &dir);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = scratch("determinism");
    let a = dir.join("a");
    let b = dir.join("b");
    assert!(lzslab(&["--preset", "lzs-balanced", "--jobs", "1"], &a).status.success());
    assert!(lzslab(&["--preset", "lzs-balanced", "--jobs", "4"], &b).status.success());
    let x = std::fs::read(a.join("lzs-balanced.csv")).unwrap();
    let y = std::fs::read(b.join("lzs-balanced.csv")).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn csv_carries_metadata_header() {
    let cfg = small_lz(vec![0.0]);
    let dir = scratch("header");
    let opts = Options {
        out_dir: dir.clone(),
        ..Default::default()
    };
    let outcome = commands::run(&cfg, &opts).unwrap();
    let text = &outcome.artifacts[0].contents;
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# lzslab "));
    assert_eq!(lines[1], "# command: lz-populations");
    let echoed = lines[2].strip_prefix("# config: ").unwrap();
    assert_eq!(RunConfig::from_json(echoed).unwrap(), cfg);
    assert!(lines[3].starts_with("z_a,p_minus_plus[dp=0]"));
    // 17 significant digits
    let first = lines[4].split(',').next().unwrap();
    let mantissa = first.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn corrupted_config_exits_with_two() {
    let dir = scratch("corrupt");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\n  \"command\": \"lzs-sweep\",\n  \"parameters\": {\"j\": 1.0,,}\n}\n").unwrap();
    let out = lzslab(&["--config", path.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = scratch("invalid");
    let mut empty = small_lz(vec![]).to_json();
    let path = dir.join("empty.json");
    std::fs::write(&path, &empty).unwrap();
    let out = lzslab(&["--config", path.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta_primes"));

    empty = empty.replace("\"lz.csv\"", "\"lz.csv\", \"extra\": 1");
    std::fs::write(&path, &empty).unwrap();
    assert_eq!(lzslab(&["--config", path.to_str().unwrap()], &dir).status.code(), Some(2));

    assert_eq!(lzslab(&["--preset", "nonesuch"], &dir).status.code(), Some(2));
    assert_eq!(
        lzslab(&["--preset", "lzs-balanced", "waveguide"], &dir).status.code(),
        Some(2)
    );
}

#[test]
fn quick_selftest_passes_and_writes_a_report() {
    let dir = scratch("selftest");
    let out = lzslab(&["selftest", "--quick"], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: lzslab::selftest::SelftestReport =
        serde_json::from_str(&std::fs::read_to_string(dir.join("selftest.json")).unwrap()).unwrap();
    assert!(report.quick);
    assert!(report.passed());
    assert!(report.seconds < 30.0);
}

fn short_waveguide(x0: f64) -> RunConfig {
    RunConfig::new(
        Job::Waveguide(Waveguide {
            j: 1.0,
            alpha: 0.1,
            gamma: 0.1,
            d: 1.0,
            sites: 160,
            x0: Some(x0),
            l: None,
            e_field: 0.05,
            z_max: Some(2.0),
            sample_every: Some(1.0),
            sweep: None,
        }),
        "wg.csv",
    )
}

#[test]
fn contamination_fails_only_under_strict() {
    let dir = scratch("strict");
    let path = dir.join("wg.json");
    // 39 sites from the edge: edge/peak just above 1e-6 at z = 0
    std::fs::write(&path, short_waveguide(120.0).to_json()).unwrap();
    let p = path.to_str().unwrap();
    let lax = lzslab(&["--config", p], &dir);
    assert_eq!(lax.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&lax.stderr).contains("warning"));
    assert_eq!(lzslab(&["--config", p, "--strict"], &dir).status.code(), Some(1));

    std::fs::write(&path, short_waveguide(110.0).to_json()).unwrap();
    assert_eq!(lzslab(&["--config", p, "--strict"], &dir).status.code(), Some(0));
}

#[test]
fn waveguide_run_writes_snapshots_and_com() {
    let cfg = short_waveguide(110.0);
    let dir = scratch("snapshots");
    let opts = Options {
        out_dir: dir.clone(),
        ..Default::default()
    };
    let outcome = commands::run(&cfg, &opts).unwrap();
    outcome.write().unwrap();
    let com = std::fs::read_to_string(dir.join("wg.csv")).unwrap();
    assert!(com.lines().any(|l| l == "z,com,upper_weight,lower_weight"));
    let rows = data_rows(&com);
    assert_eq!(rows.len(), 3);
    assert!((rows[0][1] - 110.0).abs() < 1e-9);
    assert!(rows[0][3] > 0.99 && rows[0][2] < 1e-3);

    let snaps = std::fs::read_to_string(dir.join("wg-snapshots.csv")).unwrap();
    assert!(snaps
        .lines()
        .any(|l| l.starts_with("z,site,re_psi,im_psi,intensity")));
    let rows = data_rows(&snaps);
    assert_eq!(rows.len(), 3 * 160);
    let peak = rows[..160].iter().map(|r| r[5]).fold(0.0, f64::max);
    assert_eq!(peak, 1.0);
    for r in &rows {
        assert!((r[2] * r[2] + r[3] * r[3] - r[4]).abs() <= 1e-15);
    }
}

#[test]
fn lz_plateau_and_power_law_tail() {
    let cfg = small_lz(vec![0.0, 2.0]);
    let Job::LzPopulations(p) = &cfg.job else { unreachable!() };
    let r = commands::lz_populations(&cfg, p).unwrap();
    let z = &r.axis.values;
    let plateau = r.curve("p_minus_plus[dp=0]").unwrap();
    let e = (-2.0 * std::f64::consts::PI * 9.0 / 32.0).exp();
    assert!((plateau.last().unwrap() / e - 1.0).abs() < 1e-2);

    let tail = r.curve("p_minus_plus[dp=2]").unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) = z.iter().zip(tail).map(|(a, b)| (a.ln(), b.ln())).unzip();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");

    let overlay = r.curve("asymptote_p_minus_plus[dp=2]").unwrap();
    assert_eq!(overlay.last(), tail.last());
}

#[test]
fn hermitian_sweep_agrees_in_the_adiabatic_range() {
    let cfg = RunConfig::new(
        Job::LzsSweep(lzslab_cli::config::LzsSweep {
            j: 1.0,
            alpha: 0.2,
            gamma: 0.0,
            d: 1.0,
            field: FieldGrid {
                e_min: 0.01,
                e_max: 0.06,
                points: 11,
            },
        }),
        "h.csv",
    );
    let Job::LzsSweep(p) = &cfg.job else { unreachable!() };
    let r = commands::lzs_sweep(&cfg, p).unwrap();
    for name in ["abs_diff_p_minus_plus", "abs_diff_p_minus_minus"] {
        let worst = r.curve(name).unwrap().iter().cloned().fold(0.0, f64::max);
        assert!(worst < 1e-3, "{name}: {worst}");
    }
}

#[test]
fn sweep_result_rejects_ragged_curves() {
    let cfg = small_lz(vec![0.0]);
    let axis = Series {
        name: "x".into(),
        values: vec![1.0, 2.0],
    };
    let bad = Series {
        name: "y".into(),
        values: vec![1.0],
    };
    assert!(SweepResult::new(axis, vec![bad], &cfg).is_err());
}

#[test]
fn out_dir_defaults_to_environment() {
    let dir = scratch("env");
    let out = Command::new(env!("CARGO_BIN_EXE_lzslab"))
        .args(["selftest", "--quick"])
        .env("LZSLAB_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("selftest.json").exists());
}
