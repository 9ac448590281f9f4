use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hgsparse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgsparse")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Two hubs with several edges per type, so k = 1 actually drops edges.
fn fixture(dir: &TempDir) -> PathBuf {
    let mut text = String::from("# src\tdst\ttype\n");
    for hub in [1, 2] {
        for leaf in 10..16 {
            text.push_str(&format!("{hub}\t{leaf}\t0\n"));
            text.push_str(&format!("{leaf}\t{hub}\t1\n"));
        }
    }
    let path = dir.path().join("link.dat");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn sparsify_writes_edges_and_report() {
    let dir = TempDir::new().unwrap();
    let links = fixture(&dir);
    let out = dir.path().join("sparse.dat");
    let report = dir.path().join("report.json");
    let o = hgsparse(&[
        "sparsify", "--links", p(&links), "--comment", "#", "--k", "1", "--seed", "3",
        "--out", p(&out), "--report", p(&report), "--deterministic",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let kept = fs::read_to_string(&out).unwrap().lines().count();
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["kept_edges"], kept);
    assert_eq!(json["m"], 24);
    assert!(json["ratio"].as_f64().unwrap() < 1.0);
    assert!(json["coverage_violations"].as_array().unwrap().is_empty());
    assert!(json.get("generated_at").is_none());

    let o = hgsparse(&[
        "verify", "--links", p(&links), "--comment", "#", "--sparse", p(&out), "--k", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn verify_flags_tampered_file() {
    let dir = TempDir::new().unwrap();
    let links = fixture(&dir);
    let sparse = dir.path().join("sparse.dat");
    // only the type-0 edges of hub 1
    let kept: String = (10..16).map(|leaf| format!("1\t{leaf}\t0\n")).collect();
    fs::write(&sparse, kept).unwrap();
    let o = hgsparse(&[
        "verify", "--links", p(&links), "--comment", "#", "--sparse", p(&sparse), "--k", "1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("violation: node 2 out type 0"), "{stdout}");
    assert!(stdout.contains("isolated: node 2"), "{stdout}");
}

#[test]
fn verify_rejects_unknown_edge() {
    let dir = TempDir::new().unwrap();
    let links = fixture(&dir);
    let sparse = dir.path().join("sparse.dat");
    fs::write(&sparse, "1\t99\t0\n").unwrap();
    let o = hgsparse(&[
        "verify", "--links", p(&links), "--comment", "#", "--sparse", p(&sparse), "--k", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    let dir = TempDir::new().unwrap();
    let links = fixture(&dir);
    for args in [
        vec!["sparsify", "--links", p(&links), "--k", "0"],
        vec!["sparsify", "--links", p(&links), "--k", "1", "--method", "nope"],
        vec!["eval", "--links", p(&links), "--holdout", "1.5"],
        vec!["frobnicate"],
    ] {
        let o = hgsparse(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(hgsparse(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.dat");
    fs::write(&bad, "1\t2\n").unwrap();
    let o = hgsparse(&["stats", "--links", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    let o = hgsparse(&["stats", "--links", p(&dir.path().join("missing.dat"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_stats_eval_round() {
    let dir = TempDir::new().unwrap();
    let links = dir.path().join("gen.dat");
    let nodes = dir.path().join("node.dat");
    let o = hgsparse(&[
        "generate", "--node-types", "150,100", "--edge-type", "0:1:900:1.0", "--edge-type", "1:1:300:0.5",
        "--seed", "5", "--out-links", p(&links), "--out-nodes", p(&nodes),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&links).unwrap().lines().count(), 1200);

    let o = hgsparse(&["stats", "--links", p(&links), "--nodes", p(&nodes)]);
    assert_eq!(o.status.code(), Some(0));
    let stats: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stats["m"], 1200);
    assert_eq!(stats["t"], 2);

    let o = Command::new(env!("CARGO_BIN_EXE_hgsparse"))
        .args(["eval", "--links", p(&links), "--k", "2", "--seed", "1", "--deterministic"])
        .env("HGSPARSE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let auc = report["eval"]["auc"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&auc));
    assert_eq!(report["eval"]["negatives_per_positive"], 19);
    assert_eq!(report["m"], 960);

    let o = Command::new(env!("CARGO_BIN_EXE_hgsparse"))
        .args(["eval", "--links", p(&links)])
        .env("HGSPARSE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
