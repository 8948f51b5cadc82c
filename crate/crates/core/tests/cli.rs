use std::fs;
use std::path::Path;
use std::process::Command;

use satd_holonomy::pulse::vitanov_theta;
use satd_holonomy::TWO_PI_MHZ;

fn satd(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_satd"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn pulses_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"gate": "not", "pulse_samples": 301}"#).unwrap();
    let out = satd(dir.path(), &["pulses", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let omega_max = 750.0 * TWO_PI_MHZ;
    let none = rows(&dir.path().join("pulses_none.csv"));
    let satd_rows = rows(&dir.path().join("pulses_satd.csv"));
    assert!(dir.path().join("pulses_msa.csv").exists());
    assert_eq!(none.len(), 301);
    assert!(none.iter().all(|r| r.len() == 7));
    assert_ne!(none, satd_rows);

    // Uncorrected table against the closed form; φ = π/4 splits |ψ⟩ evenly.
    let end = none.last().unwrap()[0];
    let leg = end / 2.0;
    let tau = leg / 10.0;
    for r in &none {
        let theta = vitanov_theta(r[0].min(end), leg, tau).unwrap();
        let psi = omega_max * theta.sin() * std::f64::consts::FRAC_1_SQRT_2;
        assert!((r[1] - psi).abs() <= 1e-12 * omega_max);
        assert!((r[3] - psi).abs() <= 1e-12 * omega_max);
        assert!((r[5].hypot(r[6]) - omega_max * theta.cos()).abs() <= 1e-12 * omega_max);
    }

    let peak = satd_rows
        .iter()
        .flat_map(|r| [r[1].hypot(r[2]), r[3].hypot(r[4]), r[5].hypot(r[6])])
        .fold(0.0, f64::max);
    assert!((peak / omega_max - 1.0).abs() < 0.01, "peak {peak:e}");
}

#[test]
fn gate_command_writes_summary_and_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"gate": "hadamard", "gamma1_mhz": 0, "gamma2_mhz": 0}"#,
    )
    .unwrap();
    let out = satd(
        dir.path(),
        &["gate", "--config", cfg.to_str().unwrap(), "--mode", "msa"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("gate_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["mode"], "msa");
    assert!(summary["fidelity"].as_f64().unwrap() > 0.999);
    assert_eq!(summary["gate"]["dim"], 2);
    let text = fs::read_to_string(dir.path().join("gate_trajectory.csv")).unwrap();
    assert!(text.starts_with("t,fidelity,trace_dev,pop_0,pop_1,pop_2,pop_e\n"));
    assert_eq!(text.lines().count(), 401);
}

#[test]
fn sweeps_are_shaped_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"gate": "hadamard", "time_multipliers": [1.5], "decay_multipliers": [2]}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    assert!(
        satd(dir.path(), &["sweep-time", "--config", c, "--workers", "2"])
            .status
            .success()
    );
    let first = fs::read(dir.path().join("sweep_time.csv")).unwrap();
    assert!(
        satd(dir.path(), &["sweep-time", "--config", c, "--workers", "1"])
            .status
            .success()
    );
    assert_eq!(first, fs::read(dir.path().join("sweep_time.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    let modes: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(modes, ["none", "satd", "msa"]);

    assert!(satd(dir.path(), &["sweep-decay", "--config", c])
        .status
        .success());
    let text = fs::read_to_string(dir.path().join("sweep_decay.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    };
    let typo = write("typo.json", r#"{"gama1_mhz": 2.6}"#);
    assert_eq!(
        satd(dir.path(), &["gate", "--config", &typo]).status.code(),
        Some(2)
    );
    let empty = write("empty.json", r#"{"time_multipliers": []}"#);
    assert_eq!(
        satd(dir.path(), &["sweep-time", "--config", &empty])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("absent.json");
    assert_eq!(
        satd(dir.path(), &["gate", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        satd(dir.path(), &["gate", "--workers", "0"]).status.code(),
        Some(2)
    );
    let coarse = write(
        "coarse.json",
        r#"{"integrator": {"dt_ns": 0.2, "samples": 2}}"#,
    );
    assert_eq!(
        satd(dir.path(), &["gate", "--config", &coarse])
            .status
            .code(),
        Some(3)
    );
}
