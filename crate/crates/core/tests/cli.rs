use std::path::Path;
use std::process::{Command, Output};

fn cohdisp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohdisp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL_CONFIG: &str = "\
model = \"plain\"
tau_lo = 0.1
tau_hi = 1.0
tau_points = 10
tau_spacing = \"linear\"
n_values = [5000]
lambda_values = [0.1]
d_values = [2]
";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn maximal_table() {
    let o = cohdisp(&["maximal", "--dim", "93", "--table", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("D,s,r,dispersion"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("17")));
    assert!(rows[7].starts_with("100,") && rows[7].ends_with(",9.15317884730e-1"));
}

#[test]
fn multicopy_rows() {
    let o = cohdisp(&[
        "multicopy",
        "--purity",
        "1",
        "--psq",
        "0.18",
        "--c1",
        "0.8",
        "--dim",
        "2",
        "--n",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(text.lines().next(), Some("quantity,sign,log10_magnitude,approx_value"));
    assert_eq!(rows.len(), 4);
    let value = |name: &str| -> f64 { rows.iter().find(|r| r[0] == name).unwrap()[3].parse().unwrap() };
    assert!((value("l1_coherence") - 2.24).abs() < 1e-10);
    assert!((value("dispersion") - 0.119466).abs() < 1e-6);
}

#[test]
fn taustar_json_and_csv() {
    let o = cohdisp(&["thermal", "taustar", "--d", "2", "--lambda", "0.1", "--n", "5000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["tau_star"].as_f64().unwrap() - 0.434).abs() < 0.005);
    let o = cohdisp(&[
        "thermal",
        "taustar",
        "--d",
        "2",
        "--lambda",
        "0.1",
        "--n",
        "50000",
        "--total-n",
        "1000000",
        "--model",
        "buffered",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn stats_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let third = 1.0 / 3.0;
    let row = format!("[[{third},0],[{third},0],[{third},0]]");
    let m = write(dir.path(), "f.json", &format!("[{row},{row},{row}]"));
    let o = cohdisp(&["stats", "--in", &m]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["c1"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(v["dispersion"].as_f64().unwrap().abs() < 1e-15);
    assert!((v["rel_entropy_coherence"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-12);

    let o = cohdisp(&["stats", "--in", &m, "--bits"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["rel_entropy_coherence"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-12);

    let bad = write(dir.path(), "t.json", "[[0.45,0],[0,0],[0,0],[0.45,0]]");
    let o = cohdisp(&["stats", "--in", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace"));
}

#[test]
fn scan_run_outputs_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SMALL_CONFIG);
    let o = cohdisp(&["scan", "run", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 12);
    assert_eq!(text.lines().filter(|l| l.ends_with(",true")).count(), 1);

    let out = dir.path().join("s.json");
    let o = cohdisp(&[
        "scan",
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v.len(), 11);

    let again = dir.path().join("again.json");
    cohdisp(&[
        "scan",
        "run",
        "--config",
        &cfg,
        "--out",
        again.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn scan_window_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "w.toml", &SMALL_CONFIG.replace("[5000]", "[5000, 3000000]"));
    let o = cohdisp(&["scan", "window", "--config", &cfg]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["kelvin_min"].as_f64().unwrap() - 236.0).abs() < 3.0);
    assert!((v["kelvin_max"].as_f64().unwrap() - 398.0).abs() < 3.0);

    let o = cohdisp(&["scan", "window", "--config", &cfg, "--eps-ev", "0.632"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["kelvin_max"].as_f64().unwrap() - 796.0).abs() < 6.0);

    let out_dir = dir.path().join("figs");
    let o = cohdisp(&[
        "scan",
        "figure",
        "--id",
        "fig3zoom",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(out_dir.join("fig3zoom_grid.csv").exists());
    assert!(out_dir.join("fig3zoom_maxima.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.toml",
        &SMALL_CONFIG.replace("tau_lo = 0.1", "tau_lo = 2.0"),
    );
    let o = cohdisp(&["scan", "run", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau_hi"));

    let unknown = write(dir.path(), "u.toml", &format!("{SMALL_CONFIG}colour = 1\n"));
    assert_eq!(cohdisp(&["scan", "run", "--config", &unknown]).status.code(), Some(2));

    let missing = dir.path().join("nope.toml");
    assert_eq!(
        cohdisp(&["scan", "run", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let cfg = write(dir.path(), "s.toml", SMALL_CONFIG);
    let unwritable = dir.path().join("no").join("dir.csv");
    let o = cohdisp(&["scan", "run", "--config", &cfg, "--out", unwritable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    assert_eq!(cohdisp(&["maximal", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(
        cohdisp(&["scan", "figure", "--id", "fig9", "--out-dir", "x"])
            .status
            .code(),
        Some(2)
    );
}
