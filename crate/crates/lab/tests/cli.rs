use std::path::Path;
use std::process::{Command, Output};

use lab::corpus::{random_open_set, random_symbol, rng, CellAtom};
use lab::formats::{write_atom, write_symbol};
use lab::{ExperimentConfig, Family, Suite};
use lab_core::hankel::frobenius_identity;
use lab_core::spectral::GridSpec;
use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn summary(csv: &Path) -> Value {
    let text = std::fs::read_to_string(lab::report::summary_path(csv)).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn same_seed_gives_identical_reports_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let o = lab(&[
            "journe",
            "--seed",
            "11",
            "--trials",
            "20",
            "--threads",
            threads,
            "--out",
            path(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(summary(&a), summary(&b));
    lab(&[
        "journe",
        "--seed",
        "12",
        "--trials",
        "20",
        "--out",
        path(&c),
    ]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn counting_summary_has_the_contract_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/counting.csv");
    let o = lab(&["counting", "--seed", "3", "--out", path(&out)]);
    assert!(o.status.success());
    let s = summary(&out);
    assert_eq!(s["suite"], "counting");
    assert_eq!(s["failures"], 0);
    assert!(s["max_ratio"].as_f64().unwrap() <= 1.0);
    let mut config = ExperimentConfig::default_for(Suite::Counting);
    config.seed = 3;
    assert_eq!(s["config_hash"], config.hash());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        csv.lines().count(),
        1 + s["rows"].as_u64().unwrap() as usize
    );
}

#[test]
fn empty_open_sets_give_zero_sums() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"geometry": {"rect_count": [0, 0]}}"#).unwrap();
    let out = dir.path().join("j.csv");
    let o = lab(&[
        "journe",
        "--config",
        path(&config),
        "--trials",
        "4",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["max_ratio"], 0.0);
    assert_eq!(s["failures"], 0);
}

#[test]
fn bad_configs_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let bad = [
        r#"{"analysis": {"beta": [1.0]}}"#,
        r#"{"suite": "journe"}"#,
        r#"{"unknown": 1}"#,
        "not json",
    ];
    for (k, text) in bad.iter().enumerate() {
        let config = dir.path().join(format!("bad{k}.json"));
        std::fs::write(&config, text).unwrap();
        let o = lab(&["geometric", "--config", path(&config), "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(2), "{text}");
    }
    let o = lab(&[
        "pairing",
        "--config",
        "/nonexistent.json",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_assertions_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"analysis": {"drift_tolerance": 0.001}}"#).unwrap();
    let out = dir.path().join("j.csv");
    let o = lab(&[
        "journe",
        "--config",
        path(&config),
        "--trials",
        "20",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(summary(&out)["failures"].as_u64().unwrap() > 0);
}

#[test]
fn validate_atom_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let params = ExperimentConfig::default_for(Suite::Pairing).geometry;
    let omega = random_open_set(&mut rng(8), &params, Family::Rectangles, 4);
    let atom = CellAtom::random(&omega, GridSpec::new(3, 3), 1.5, 0.25, 2)
        .unwrap()
        .atom;

    let manifest = write_atom(dir.path(), "good", &atom).unwrap();
    let o = lab(&["validate-atom", "--in", path(&manifest)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["ok"], true);
    assert_eq!(report["outside_omega"], 0.0);

    let manifest = write_atom(dir.path(), "loud", &atom.scaled(10.0)).unwrap();
    let o = lab(&["validate-atom", "--in", path(&manifest)]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["global"]["ok"], false);

    let o = lab(&[
        "validate-atom",
        "--in",
        path(&dir.path().join("missing.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn norms_command() {
    let dir = tempfile::tempdir().unwrap();
    let symbol = random_symbol(4, 6, 1.0, true);
    let file = dir.path().join("s.bin");
    write_symbol(&mut std::fs::File::create(&file).unwrap(), &symbol).unwrap();
    let o = lab(&["norms", "--symbol", path(&file), "--p", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let s2 = v["schatten"].as_f64().unwrap();
    let frob = frobenius_identity(&symbol).sqrt();
    assert!((s2 - frob).abs() <= 1e-10 * frob);
    assert!(v["ratio"].as_f64().unwrap() > 0.0);

    std::fs::write(&file, b"{\"N\":2}\n").unwrap();
    assert_eq!(
        lab(&["norms", "--symbol", path(&file), "--p", "2"])
            .status
            .code(),
        Some(2)
    );
}
