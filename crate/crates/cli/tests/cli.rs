use std::path::Path;
use std::process::{Command, Output};

use narx_upso_cli::{Manifest, Sidecar};

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_narx-upso")).args(args).current_dir(cwd).output().expect("spawn")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["generate", "--system", "S1", "--n", "1000", "--seed", "7", "--out", "s1.csv"], dir.path());
    ok(&out);
    let csv = std::fs::read_to_string(dir.path().join("s1.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "k,u,y");
    assert_eq!(csv.lines().count(), 1001);
    let side = Sidecar::load(&dir.path().join("s1.json")).unwrap();
    assert_eq!(side.system, "S1");
    assert_eq!(side.seed, 7);
    assert_eq!(side.true_terms.len(), 4);
    assert_eq!(side.true_mask.unwrap().cardinality(), 4);

    let again = tempfile::tempdir().unwrap();
    ok(&bin(&["generate", "--system", "S1", "--seed", "7", "--out", "s1.csv"], again.path()));
    assert_eq!(csv, std::fs::read_to_string(again.path().join("s1.csv")).unwrap());
}

#[test]
fn identify_report_validate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(&bin(&["generate", "--system", "S3", "--seed", "3", "--out", "s3.csv"], p));
    ok(&bin(&["identify", "--data", "s3.csv", "--algorithm", "ofr-err", "--runs", "2", "--out", "ofr"], p));
    for f in ["run_000.json", "run_001.json", "summary.json", "manifest.json", "dataset.csv"] {
        assert!(p.join("ofr").join(f).exists(), "{f}");
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("ofr/summary.json")).unwrap()).unwrap();
    for key in ["algorithm", "seed", "config", "best_mask", "best_terms", "coefficients", "J", "nmse", "trace", "fes_used", "err_sequence"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(p.join("ofr/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.n_est, 700);

    let out = bin(&["report", "--runs", "ofr"], p);
    ok(&out);
    assert!(p.join("ofr/frequency.csv").exists());
    assert!(!p.join("ofr/outcomes.csv").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("outcomes.csv"));

    ok(&bin(&["report", "--runs", "ofr", "--truth", "s3.json"], p));
    let outcomes = std::fs::read_to_string(p.join("ofr/outcomes.csv")).unwrap();
    assert_eq!(outcomes.lines().next().unwrap(), "system,algorithm,kind,count");
    assert_eq!(outcomes.lines().count(), 5);
    let total: usize = outcomes.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 2);

    let out = bin(&["validate", "--runs", "ofr", "--max-lag", "10"], p);
    ok(&out);
    let validity = std::fs::read_to_string(p.join("ofr/validity.csv")).unwrap();
    assert_eq!(validity.lines().next().unwrap(), "test,lag,value,band");
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 5);
}

#[test]
fn short_searches_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for alg in ["2d-upso", "ga", "bpso"] {
        ok(&bin(
            &["--workers", "1", "identify", "--system", "S1", "--algorithm", alg, "--runs", "1", "--max-fes", "60", "--out", alg],
            p,
        ));
        let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join(alg).join("summary.json")).unwrap()).unwrap();
        assert_eq!(s["algorithm"], alg);
        assert_eq!(s["fes_used"], 60);
    }
    ok(&bin(
        &["sweep", "--system", "S1", "--max-fes", "60", "--u-f", "0.1,0.9", "--rg", "5", "--k", "1", "--out", "sw"],
        p,
    ));
    let grid = std::fs::read_to_string(p.join("sw/sweep.csv")).unwrap();
    assert_eq!(grid.lines().next().unwrap(), "u_f,rg,runs,mean_j");
    assert_eq!(grid.lines().count(), 3);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("exp.toml"), "[data]\nsystem = \"S2\"\n[search]\nalgorithm = \"ofr-err\"\nruns = 1\n").unwrap();
    ok(&bin(&["identify", "--config", "exp.toml", "--out", "o"], p));
    let m: Manifest = serde_json::from_str(&std::fs::read_to_string(p.join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(m.algorithm, "ofr-err");
    assert_eq!(m.system.as_deref(), Some("S2"));
    assert_eq!(m.runs, 1);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for args in [
        vec!["generate", "--system", "S9"],
        vec!["identify", "--data", "missing.csv"],
        vec!["identify", "--system", "S1", "--runs", "0"],
        vec!["report", "--runs", "nowhere"],
        vec!["identify"],
    ] {
        let out = bin(&args, p);
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
    std::fs::write(p.join("bad.toml"), "[search]\nu_f = 2\n").unwrap();
    assert!(!bin(&["identify", "--config", "bad.toml"], p).status.success());
}
