use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cagc-lab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

const DISK: &str = r#"{"kind": "disk", "params": {"center": [0, 0], "radius": 1}}"#;

#[test]
fn malformed_config_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\"domain\": ");
    let out = lab(&["cheng-yau", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parsing"));
    let cfg = write_config(dir.path(), "grid.json", r#"{"grid": 24}"#);
    assert_eq!(lab(&["cheng-yau", "--config", &cfg]).status.code(), Some(1));
    assert_eq!(lab(&["cheng-yau"]).status.code(), Some(1));
    assert_eq!(lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_fixture_exits_with_one() {
    let out = lab(&["verify", "--fixture", "torus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown fixture"));
}

#[test]
fn thread_count_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_cagc-lab"))
        .args(["verify", "--fixture", "trough"])
        .env("CAGC_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_cagc-lab"))
        .args(["verify", "--fixture", "trough"])
        .env("CAGC_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn cheng_yau_disk_reports_minus_one_at_the_centre() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "disk.json", &format!(r#"{{"domain": {DISK}, "grid": 32}}"#));
    let out_dir = dir.path().join("out");
    let out = lab(&["cheng-yau", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("report.json"));
    assert_eq!(report["pass"], Value::Bool(true));
    let w0 = report["levels"][0]["w_origin"].as_f64().unwrap();
    assert!((w0 + 1.0).abs() < 2e-2, "{w0}");
    let w = read_json(&out_dir.join("w.json"));
    assert_eq!(w["values"].as_array().unwrap().len(), w["mask"].as_array().unwrap().len());
}

#[test]
fn cheng_yau_square_edge_grows_like_a_cube_root() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "square.json",
        r#"{"domain": {"kind": "polygon", "params": {"vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]}},
            "grid": 32, "growth_points": [[1, 0]]}"#,
    );
    let out_dir = dir.path().join("out");
    let out = lab(&["cheng-yau", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&out_dir.join("report.json"));
    let e = report["levels"][0]["growth"][0]["exponent"].as_f64().unwrap();
    assert!((e - 1.0 / 3.0).abs() < 0.1, "{e}");
}

#[test]
fn grid_flag_adds_doubling_levels() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "disk.json", &format!(r#"{{"domain": {DISK}, "grid": 8}}"#));
    let out_dir = dir.path().join("out");
    let out = lab(&["cheng-yau", "--config", &cfg, "--grid", "3", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("level ")).count(), 3);
    let report = read_json(&out_dir.join("report.json"));
    let hs: Vec<f64> = report["levels"].as_array().unwrap().iter().map(|l| l["h"].as_f64().unwrap()).collect();
    assert_eq!(hs, vec![0.125, 0.0625, 0.03125]);
}

#[test]
fn two_step_disk_mesh_and_reproducible_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg =
        write_config(dir.path(), "ts.json", &format!(r#"{{"domain": {DISK}, "grid": 16, "c": 1, "mesh": true}}"#));
    let run = |name: &str| {
        let d = dir.path().join(name);
        let out = lab(&["two-step", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        d
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["u.json", "diagnostics.json", "mesh.obj", "mesh.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let diag = read_json(&a.join("diagnostics.json"));
    assert_eq!(diag["levels"][0]["cagc"]["pass"], Value::Bool(true));
    let obj = fs::read_to_string(a.join("mesh.obj")).unwrap();
    let vertices = obj.lines().filter(|l| l.starts_with("v ")).count();
    let max_index = obj
        .lines()
        .filter(|l| l.starts_with("f "))
        .flat_map(|l| l[2..].split(' ').map(|v| v.parse::<usize>().unwrap()).collect::<Vec<_>>())
        .max()
        .unwrap();
    assert!(max_index <= vertices);
    let csv = fs::read_to_string(a.join("mesh.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("vertex,det_s,curvature"));
    assert_eq!(csv.lines().count(), vertices + 1);
}

#[test]
fn two_step_blowup_needs_three_levels() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "tri.json", r#"{"phi": {"kind": "inscribed_triangle"}, "blowup": {}}"#);
    assert_eq!(lab(&["two-step", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn two_step_triangle_reports_slopes_at_every_vertex() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "tri.json",
        r#"{"phi": {"kind": "inscribed_triangle"}, "grid": 16, "levels": 3, "blowup": {}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = lab(&["two-step", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let diag = read_json(&out_dir.join("diagnostics.json"));
    let blowup = diag["blowup"].as_array().unwrap();
    assert_eq!(blowup.len(), 3);
    for b in blowup {
        assert_eq!(b["inner"]["levels"].as_array().unwrap().len(), 3);
        assert!(["finite", "infinite", "undetermined"].contains(&b["classification"].as_str().unwrap()));
    }
}

#[test]
fn foliation_leaves_follow_the_scaling() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "fol.json", &format!(r#"{{"domain": {DISK}, "grid": 32, "t": [-1, 0, 1]}}"#));
    let out_dir = dir.path().join("out");
    let out = lab(&["foliation", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let leaves = fs::read_to_string(out_dir.join("leaves.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        leaves.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!((r[3] + (-r[0] / 2.0).exp()).abs() < 3e-2, "{r:?}");
    }
    let report = read_json(&out_dir.join("report.json"));
    let d = &report["levels"][0]["diagnostics"];
    assert!(d["monotone"].as_array().unwrap().iter().all(|v| v == &Value::Bool(true)));
    assert_eq!(d["k_convexity_violations"].as_u64(), Some(0));
    assert!(out_dir.join("k_samples.csv").exists() && out_dir.join("u_t2.json").exists());
}

#[test]
fn foliation_needs_a_t_list() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "fol.json", &format!(r#"{{"domain": {DISK}}}"#));
    assert_eq!(lab(&["foliation", "--config", &cfg]).status.code(), Some(1));
    let cfg = write_config(dir.path(), "fol2.json", &format!(r#"{{"domain": {DISK}, "t": [1, 0, 2]}}"#));
    assert_eq!(lab(&["foliation", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn verify_hyperboloid_passes() {
    let out = lab(&["verify", "--fixture", "hyperboloid"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 4);
}

#[test]
fn verify_negative_controls_are_not_asymptotic() {
    for f in ["trough", "remark"] {
        let out = lab(&["verify", "--fixture", f]);
        assert_eq!(out.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&out.stdout).contains("not asymptotic"), "{f}");
    }
}

#[test]
fn verify_fixture_from_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "v.json", r#"{"fixture": "trough", "grid": 16}"#);
    let out_dir = dir.path().join("out");
    let out = lab(&["verify", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary = read_json(&out_dir.join("verify.json"));
    assert_eq!(summary["fixture"], "trough");
    assert_eq!(summary["h"][0].as_f64(), Some(1.0 / 16.0));
}

#[test]
fn stadium_counterexample_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "stadium.json",
        r#"{"phi": {"kind": "stadium_counterexample"}, "grid": 32, "levels": 3, "blowup": {"counterexample": true}}"#,
    );
    let out = lab(&["two-step", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("finite"));
}
