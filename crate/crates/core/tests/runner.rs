use std::fs;
use std::process::Command;

use cavity_cphase::dynamics::PropagationSettings;
use cavity_cphase::runner::{run_scenario, sweep, write_config, Scenario, ScenarioName, Task};
use cavity_cphase::SystemConfig;

fn value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

#[test]
fn paper_n3_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::builtin(ScenarioName::PaperN3).unwrap();
    let out = run_scenario(&s, dir.path()).unwrap();
    assert!(out.passed(), "{:#?}", out.checks);
    let report = fs::read_to_string(dir.path().join("gate_report.txt")).unwrap();
    assert!((value(&report, "gate_time_seconds") - 1.20048e-5).abs() < 1e-8);
    assert_eq!(value(&report, "p_e"), 1.09375e-3);
    assert!(report.contains("\n\nblock = budget\n"));
    let couplings = fs::read_to_string(dir.path().join("couplings.csv")).unwrap();
    assert_eq!(
        couplings.lines().next(),
        Some("j,zeta_prime,xi_prime,lambda_prime")
    );
    assert_eq!(couplings.lines().count(), 3);
    let conditions = fs::read_to_string(dir.path().join("conditions.csv")).unwrap();
    assert!(
        conditions.lines().skip(1).all(|l| l.ends_with(",true")),
        "{conditions}"
    );
    let design = fs::read_to_string(dir.path().join("design_report.csv")).unwrap();
    assert!(design.lines().nth(1).unwrap().starts_with("3,2.12842e1,"));
}

#[test]
fn paper_n3_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s = Scenario::builtin(ScenarioName::PaperN3).unwrap();
    let fa = run_scenario(&s, a.path()).unwrap().files;
    run_scenario(&s, b.path()).unwrap();
    for f in fa {
        let name = f.file_name().unwrap();
        assert_eq!(
            fs::read(&f).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn paper_n4_and_n200_times() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(
        &Scenario::builtin(ScenarioName::PaperN4).unwrap(),
        dir.path(),
    )
    .unwrap();
    assert!(out.passed(), "{:#?}", out.checks);
    let report = fs::read_to_string(dir.path().join("gate_report.txt")).unwrap();
    assert!((value(&report, "gate_time_seconds") - 1.44246e-5).abs() < 1e-8);

    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(
        &Scenario::builtin(ScenarioName::PaperN200).unwrap(),
        dir.path(),
    )
    .unwrap();
    assert!(out.passed(), "{:#?}", out.checks);
    let report = fs::read_to_string(dir.path().join("gate_report.txt")).unwrap();
    assert!((value(&report, "lambda_prime_12") - 9.45658e-4).abs() < 1e-9);
    assert!((value(&report, "pair_gate_time_seconds") - 1.5551e-5).abs() < 1e-8);
}

#[test]
fn failed_check_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = Scenario::builtin(ScenarioName::PaperN3).unwrap();
    s.tasks = vec![Task::Couplings];
    s.g_hz *= 2.0;
    let out = run_scenario(&s, dir.path()).unwrap();
    assert!(!out.passed());
    let checks = fs::read_to_string(dir.path().join("checks.txt")).unwrap();
    assert!(checks.contains("FAIL gate_time_seconds"));
}

#[test]
fn sweep_crosses_anchor_coupling() {
    let values: Vec<f64> = (0..=8).map(|i| 19.0 + 0.5 * i as f64).collect();
    let csv = sweep(
        &SystemConfig::paper_n3(),
        "pair[3]",
        &values,
        &[Task::Couplings],
        &PropagationSettings::default(),
    )
    .unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (l12, l13, err) = (col("lambda_prime_12"), col("lambda_prime_13"), col("error"));
    let mut crossing = None;
    let mut prev: Option<(f64, f64)> = None;
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let x: f64 = cells[0].parse().unwrap();
        if !cells[err].is_empty() {
            prev = None;
            continue;
        }
        let d = cells[l13].parse::<f64>().unwrap() - cells[l12].parse::<f64>().unwrap();
        if let Some((px, pd)) = prev {
            if pd.signum() != d.signum() && px > 20.5 {
                crossing = Some((px, x));
            }
        }
        prev = Some((x, d));
    }
    let (lo, hi) = crossing.expect("no crossing");
    assert!(lo <= 21.2842 && 21.2842 <= hi, "{lo}..{hi}");
}

#[test]
fn sweep_hopping_scales_modes() {
    let csv = sweep(
        &SystemConfig::paper_n3(),
        "hop",
        &[0.25, 0.5],
        &[Task::Couplings],
        &PropagationSettings::default(),
    )
    .unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(4).map(|c| c.parse().unwrap()).collect())
        .collect();
    for k in 1..=3 {
        assert!((rows[1][k] - 2.0 * rows[0][k]).abs() < 1e-12);
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cavity-cphase"))
}

#[test]
fn cli_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let ok = bin()
        .args([
            "--scenario",
            "paper-n3",
            "--tasks",
            "couplings,budget",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS p_c"));

    let bad = bin()
        .args([
            "--scenario",
            "paper-n3",
            "--tasks",
            "couplings",
            "--g-hz",
            "1e8",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));

    let unknown = bin().args(["--scenario", "paper-n9"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn cli_custom_config_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("n3.conf");
    fs::write(&cfg_path, write_config(&SystemConfig::paper_n3())).unwrap();
    let run = bin()
        .args(["run", "--scenario", "custom", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(dir.path().join("out/gate_report.txt").exists());

    let csv_path = dir.path().join("sweep.csv");
    let sw = bin()
        .args(["sweep", "--config"])
        .arg(&cfg_path)
        .args([
            "--scenario",
            "custom",
            "--tasks",
            "couplings",
            "--path",
            "hop",
            "--values",
            "0.25:0.5:0.25",
            "--out",
        ])
        .arg(&csv_path)
        .output()
        .unwrap();
    assert!(
        sw.status.success(),
        "{}",
        String::from_utf8_lossy(&sw.stderr)
    );
    assert_eq!(fs::read_to_string(&csv_path).unwrap().lines().count(), 3);

    let empty = bin()
        .args(["sweep", "--path", "hop", "--tasks", "couplings"])
        .output()
        .unwrap();
    assert!(empty.status.success());
    assert_eq!(String::from_utf8_lossy(&empty.stdout).lines().count(), 1);
}
