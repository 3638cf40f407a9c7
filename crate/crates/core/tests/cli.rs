use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bouncer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bouncer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn eigen_table_has_the_known_turning_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouncer(&[
        "eigen",
        "--out",
        dir.path().to_str().unwrap(),
        "--levels",
        "1..5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("eigen.csv"));
    let tp = header.iter().position(|h| h == "turning_point_um").unwrap();
    assert_eq!(rows.len(), 5);
    assert!((num(&rows[0][tp]) - 13.7).abs() < 0.1);
    assert!((num(&rows[1][tp]) - 24.0).abs() < 0.1);
    assert!(dir.path().join("eigen.meta.json").exists());
}

#[test]
fn empty_level_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouncer(&[
        "eigen",
        "--out",
        dir.path().to_str().unwrap(),
        "--levels",
        "5..2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error kind=config code=2:"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"geometry": {"mirror_length": 0.3}}"#).unwrap();
    let out = bouncer(&["eigen", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mirror_length"));
}

#[test]
fn shipped_config_loads() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/config/default.json");
    let out = bouncer(&["config", "--config", cfg]);
    assert!(out.status.success());
    let echoed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(echoed["n_max"], 100);
}

#[test]
fn resonance_scan_peaks_reach_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouncer(&["fig1", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("fig1.csv"));
    assert_eq!(header.len(), 2 + 2);
    let peak = rows
        .iter()
        .map(|r| (num(&r[0]), num(&r[2])))
        .filter(|(f, _)| (240.0..270.0).contains(f))
        .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    assert!((peak.0 - 254.563).abs() < 0.3, "{peak:?}");
    assert!(peak.1 > 0.999);
}

#[test]
fn gradient_falls_inversely_with_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouncer(&["fig2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let (_, rows) = read_csv(&dir.path().join("fig2.csv"));
    let (a, b) = (&rows[0], &rows[rows.len() - 1]);
    for col in 1..=2 {
        let slope = (num(&b[col]) / num(&a[col])).ln() / (num(&b[0]) / num(&a[0])).ln();
        assert!((slope + 1.0).abs() < 1e-9, "{slope}");
    }
    let (_, markers) = read_csv(&dir.path().join("fig2_markers.csv"));
    let times: Vec<f64> = markers.iter().map(|r| num(&r[0])).collect();
    assert_eq!(times, vec![0.01, 0.075, 886.0]);
}

#[test]
fn vertical_wall_column_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouncer(&[
        "fig4",
        "--out",
        dir.path().to_str().unwrap(),
        "--alpha",
        "0,1e-5",
        "--format",
        "both",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("fig4.csv"));
    assert_eq!(header, ["level", "p_alpha_0e0", "p_alpha_1e-5"]);
    assert!(rows.iter().all(|r| num(&r[1]) == 0.0 && num(&r[2]) > 0.0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig4.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 30);
}

#[test]
fn budget_total_is_the_sum_of_channels() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouncer(&[
        "fig6",
        "--out",
        dir.path().to_str().unwrap(),
        "--levels",
        "1..8",
    ]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("fig6.csv"));
    let col = |n: &str| header.iter().position(|h| h == n).unwrap();
    for r in &rows {
        let sum: f64 = ["beta_rate", "wavy_rate", "wall_rate", "corner_rate"]
            .iter()
            .map(|c| num(&r[col(c)]))
            .sum();
        assert!((num(&r[col("total_rate")]) - sum).abs() <= 1e-11 * sum);
    }
    let (_, ts) = read_csv(&dir.path().join("timescales.csv"));
    assert_eq!(ts[3][0], "graviton_decay");
    assert_eq!(ts[3][1], "");
}

#[test]
fn earth_table_has_zero_row_at_rest() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouncer(&[
        "earth",
        "--out",
        dir.path().to_str().unwrap(),
        "--levels",
        "1..3",
    ]);
    assert!(out.status.success());
    let (_, rows) = read_csv(&dir.path().join("earth.csv"));
    assert_eq!(rows.len(), 9);
    for r in rows.iter().filter(|r| num(&r[1]) == 0.0) {
        assert_eq!(num(&r[2]), 0.0);
    }
    let (_, summary) = read_csv(&dir.path().join("earth_summary.csv"));
    assert_eq!(summary[0][4], "discrepancy");
}

#[test]
fn profile_ingestion_recovers_the_exponent() {
    use quantum_bouncer::losses::{synthesize_profile, PsdModel};
    let dir = tempfile::tempdir().unwrap();
    let profile = synthesize_profile(&PsdModel::default(), 4096, 1e-5, 7).unwrap();
    let path = dir.path().join("profile.bin");
    fs::write(&path, profile.to_bytes()).unwrap();
    let out = bouncer(&[
        "psd",
        "--profile",
        path.to_str().unwrap(),
        "--window",
        "hann",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("psd.meta.json")).unwrap())
            .unwrap();
    let note = meta["notes"][0].as_str().unwrap();
    let exponent: f64 = note.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((exponent + 2.9).abs() < 0.2, "{note}");
}
