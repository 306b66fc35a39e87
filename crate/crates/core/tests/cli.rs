use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn rvflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rvflow"))
        .args(args)
        .env_remove("RVFLOW_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn flow_example_emits_csv_and_echoes_config() {
    let o = rvflow(&["flow", "--z0", "0.3+0.2i", "--target", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,re,im"));
    let last: Vec<f64> = out.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[1] - 1.0).hypot(last[2]) < 1e-6);
    let echo: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).lines().next().unwrap()).unwrap();
    assert_eq!(echo["config"]["command"]["subcommand"], "flow");
    assert_eq!(echo["config"]["command"]["integrator"]["tol"], 1e-9);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["flow", "--z0", "-0.4+0.9i", "--noise", "exp", "--t-max", "5", "--seed", "3"][..],
        &["schwarzian", "--c", "1.2+0.3i", "--samples", "500"][..],
        &["verify", "convergence_bounds", "--seed", "7"][..],
    ] {
        let (a, b) = (rvflow(args), rvflow(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two_with_a_message() {
    for args in [
        &["flow", "--z0", "1", "--speed", "3"][..],
        &["flow", "--z0", "1 + i"][..],
        &["frobnicate"][..],
        &["geom", "poincare", "--t", "-1"][..],
        &["converge", "ahlfors-weill", "--k", "0.7"][..],
        &["verify", "no_such_suite"][..],
    ] {
        let o = rvflow(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn geom_poincare_plain_is_coth_one() {
    let o = rvflow(&["geom", "poincare", "--t", "1", "--r", "0", "--format", "plain"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 1.0 / 1f64.tanh()).abs() < 1e-12);
    assert!(stdout(&o).starts_with("1.3130"));
}

#[test]
fn fixed_points_report_four_classified_zeros() {
    let j = json(&rvflow(&["fixed-points"]));
    let zeros = j["zeros"].as_array().unwrap();
    let classes: Vec<&str> = zeros.iter().map(|z| z["class"].as_str().unwrap()).collect();
    assert_eq!(classes, ["SADDLE", "UNSTABLE", "STABLE", "SADDLE"]);
}

#[test]
fn pair_record_has_the_published_fields() {
    let j = json(&rvflow(&["pair", "--c", "2", "--s", "1"]));
    assert!((j["value_re"].as_f64().unwrap() - 3.0 * std::f64::consts::PI / 4.0).abs() < 1e-12);
    assert_eq!(j["value_im"].as_f64().unwrap(), 0.0);
    assert!(j["est_error"].as_f64().unwrap() < 1e-10);
    assert!(j["n_evals"].as_u64().unwrap() > 0);
}

#[test]
fn schwarzian_verdicts_agree() {
    let j = json(&rvflow(&["schwarzian", "--c", "1.5", "--samples", "2000"]));
    assert_eq!(j["disk_criterion"], true);
    assert_eq!(j["tests_agree"], true);
    let j = json(&rvflow(&["schwarzian", "--c", "2.5", "--samples", "5000"]));
    assert_eq!(j["disk_criterion"], false);
    assert_eq!(j["empirical"]["injective"], false);
}

#[test]
fn converge_banach_certificate_holds() {
    let j = json(&rvflow(&["converge", "banach", "--factor", "0.3", "--fixed", "-1+2i", "--x0", "4"]));
    let fp = rvflow::parse_complex(j["fixed_point"].as_str().unwrap()).unwrap();
    assert!((fp - rvflow::Complex64::new(-1.0, 2.0)).norm() <= j["certified_radius"].as_f64().unwrap());
}

fn labels_in(dir: &Path, stem: &str) -> Vec<(f64, f64, String)> {
    std::fs::read_to_string(dir.join(format!("{stem}.csv")))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].to_string())
        })
        .collect()
}

#[test]
fn portrait_writes_svg_and_raster() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["portrait", "--x-min", "0", "--x-max", "2", "--y-min", "0", "--y-max", "2", "--nx", "6", "--ny", "6", "--out-dir", d];
    let o = rvflow(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(dir.path().join("portrait.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("#c0392b"));
    let labels = labels_in(dir.path(), "portrait");
    assert_eq!(labels.len(), 36);
    for (x, y, l) in &labels {
        if (x - 1.0).hypot(*y) < 0.95 {
            assert_eq!(l, "1", "({x}, {y})");
        }
    }
    let first = std::fs::read(dir.path().join("portrait.csv")).unwrap();
    rvflow(&args);
    assert_eq!(first, std::fs::read(dir.path().join("portrait.csv")).unwrap());
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rvflow"))
        .args(["portrait", "--nx", "1", "--ny", "1", "--no-labels", "--stem", "single"])
        .env("RVFLOW_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("single.svg")).unwrap();
    assert!(!dir.path().join("single.csv").exists());
    assert!(svg.contains("<circle"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flow.conf");
    std::fs::write(&cfg, "method=rk4\ndt=0.5\nt_max=2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&rvflow(&["flow", "--z0", "0.5", "--config", cfg]));
    assert_eq!(from_file.lines().count(), 1 + 5);
    let overridden = stdout(&rvflow(&["flow", "--z0", "0.5", "--config", cfg, "--dt", "1"]));
    assert_eq!(overridden.lines().count(), 1 + 3);
}
