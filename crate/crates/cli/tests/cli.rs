use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const DISK: &str = r#"{"outer":{"circle":{"center":[0,0],"radius":1}}}"#;

fn specobs(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specobs"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("SPECOBS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn eigen_on_disk_writes_summary_and_manifest() {
    let tmp = TempDir::new().unwrap();
    let domain = write(tmp.path(), "disk.json", DISK);
    let out = tmp.path().join("out");
    let o = specobs(&out, &["--json", "eigen", "--domain", &domain, "--h", "0.03125"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let summary = read_json(&out.join("eigen.json"));
    let lambda = summary["lambda1"].as_f64().unwrap();
    // j_{0,1}^2
    assert!((lambda - 5.783185962946784).abs() < 5e-3, "{lambda}");

    let stdout: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stdout["lambda1"], summary["lambda1"]);

    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "eigen");
    assert_eq!(manifest["seed"], 0);
    assert!(manifest["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn covering_obstacle_exits_3() {
    let tmp = TempDir::new().unwrap();
    let domain = write(tmp.path(), "disk.json", DISK);
    let cover = write(
        tmp.path(),
        "cover.json",
        r#"{"kind":"region","circle":{"center":[0,0],"radius":1}}"#,
    );
    let o = specobs(
        tmp.path(),
        &["eigen", "--domain", &domain, "--obstacle", &cover, "--h", "0.0625"],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn infeasible_budget_exits_1() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        &format!(r#"{{"domain":{DISK},"L":6.3,"h":0.03125}}"#),
    );
    let o = specobs(tmp.path(), &["optimize", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn malformed_input_exits_1() {
    let tmp = TempDir::new().unwrap();
    let domain = write(tmp.path(), "disk.json", "{\"outer\": 3}");
    let o = specobs(tmp.path(), &["eigen", "--domain", &domain, "--h", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn minkowski_writes_csv_with_header() {
    let tmp = TempDir::new().unwrap();
    let ring = write(
        tmp.path(),
        "ring.json",
        r#"{"kind":"chain","circle":{"center":[0,0],"radius":1}}"#,
    );
    let o = specobs(tmp.path(), &["minkowski", "--obstacle", &ring, "--h", "0.01"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("minkowski.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("eps,area,quotient"));
    assert!(csv.lines().count() > 2);
    let est = read_json(&tmp.path().join("minkowski.json"));
    let content = est["content"].as_f64().unwrap();
    assert!((content - 4.0 * std::f64::consts::PI).abs() < 0.5, "{content}");
}

#[test]
fn annulus_table_lists_each_pair() {
    let tmp = TempDir::new().unwrap();
    let o = specobs(tmp.path(), &["annulus-table", "--pairs", "0.5:1,1:2.25"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("annulus_table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn bad_pair_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let o = specobs(tmp.path(), &["annulus-table", "--pairs", "0.5-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_minkowski_passes() {
    let tmp = TempDir::new().unwrap();
    let o = specobs(tmp.path(), &["verify", "--suite", "minkowski"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report = read_json(&tmp.path().join("verify.json"));
    let checks = report.as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn optimize_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "opt.json",
        &format!(
            r#"{{"domain":{DISK},"L":3.14159,"h":0.0625,"max_iters":6,"certify":false,
               "init":{{"center":[0.1,0],"a0":0.4,"a":[],"b":[]}}}}"#
        ),
    );
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|d| {
            let out = tmp.path().join(d);
            let o = specobs(&out, &["optimize", &cfg]);
            assert!(
                matches!(o.status.code(), Some(0 | 4)),
                "{}",
                String::from_utf8_lossy(&o.stderr)
            );
            let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
            assert_eq!(trace.lines().next(), Some("iter,lambda1,perimeter,step"));
            (fs::read_to_string(out.join("result.json")).unwrap(), trace)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);

    let result: serde_json::Value = serde_json::from_str(&runs[0].0).unwrap();
    let perimeter = result["perimeter"].as_f64().unwrap();
    assert!((perimeter - 3.14159).abs() < 1e-3);
}
