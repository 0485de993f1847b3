use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const MINIMAL: &str = r#"
master_seed = 11

[walk]
kind = "simple"

[scenery]
distribution = "rademacher"

[grid]
n_min_exp = 6
n_max_exp = 10

[[experiment]]
kind = "annealed_variance"
replicas = 2000
exponents = [10]
rel_tolerance = 0.3
require_trend = false
"#;

fn rwrs(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwrs"))
        .args(args)
        .current_dir(dir)
        .env_remove("RWRS_THREADS")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name.ends_with(".json") && name != "manifest.json" || name.ends_with(".csv")
        })
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn minimal_config_passes_and_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("min.toml"), MINIMAL).unwrap();
    let out = rwrs(&["run", "min.toml", "--run-dir", "out"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dir = tmp.path().join("out");
    for f in ["manifest.json", "resolved_config.toml", "checks.csv", "00-annealed_variance.json", "00-annealed_variance.csv"] {
        assert!(dir.join(f).is_file(), "{f} missing");
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], true);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert!(manifest["experiments"][0]["seed"].is_u64());
    let csv = fs::read_to_string(dir.join("00-annealed_variance.csv")).unwrap();
    assert!(csv.starts_with("experiment,n,quantity,estimate,stderr,target,scenery_seed\n"));
}

#[test]
fn default_run_directory_is_named_by_hash() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("min.toml"), MINIMAL.replace("master_seed = 11", "master_seed = 11\noutput_dir = \"runs\"")).unwrap();
    let out = rwrs(&["run", "min.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dirs: Vec<_> = fs::read_dir(tmp.path().join("runs")).unwrap().collect();
    assert_eq!(dirs.len(), 1);
    let name = dirs[0].as_ref().unwrap().file_name().to_string_lossy().into_owned();
    let (hash, stamp) = name.split_once('-').unwrap();
    assert_eq!(hash.len(), 16);
    assert!(stamp.ends_with('Z'));
}

#[test]
fn failed_verdict_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    // a tolerance no estimate can meet
    fs::write(tmp.path().join("strict.toml"), MINIMAL.replace("rel_tolerance = 0.3", "rel_tolerance = 1e-9")).unwrap();
    let out = rwrs(&["run", "strict.toml", "--run-dir", "out"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}

#[test]
fn pareto_beta_two_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = MINIMAL.replace("distribution = \"rademacher\"", "distribution = \"pareto\"\nbeta = 2.0");
    fs::write(tmp.path().join("bad.toml"), text).unwrap();
    for args in [&["run", "bad.toml", "--run-dir", "out"][..], &["validate", "bad.toml"]] {
        let out = rwrs(args, tmp.path());
        assert_eq!(out.status.code(), Some(1));
        let msg = stderr(&out);
        assert!(msg.contains("(A2)"), "{msg}");
        assert!(msg.contains("scenery.beta"), "{msg}");
    }
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_key_names_its_path() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("typo.toml"), MINIMAL.replace("n_max_exp = 10", "n_max_exp = 10\nn_maxx_exp = 3")).unwrap();
    let out = rwrs(&["validate", "typo.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("grid.n_maxx_exp"), "{}", stderr(&out));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("min.toml"), MINIMAL).unwrap();
    let a = rwrs(&["run", "min.toml", "--run-dir", "a", "--threads", "1"], tmp.path());
    let b = rwrs(&["run", "min.toml", "--run-dir", "b", "--threads", "3"], tmp.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let (ra, rb) = (report_files(&tmp.path().join("a")), report_files(&tmp.path().join("b")));
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
}

#[test]
fn resolved_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("min.toml"), MINIMAL).unwrap();
    assert_eq!(rwrs(&["run", "min.toml", "--run-dir", "a"], tmp.path()).status.code(), Some(0));
    let again = rwrs(&["run", "a/resolved_config.toml", "--run-dir", "b"], tmp.path());
    assert_eq!(again.status.code(), Some(0), "{}", stderr(&again));
    assert_eq!(report_files(&tmp.path().join("a")), report_files(&tmp.path().join("b")));
    let hash = |d: &str| {
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join(d).join("manifest.json")).unwrap()).unwrap();
        m["config_hash"].clone()
    };
    assert_eq!(hash("a"), hash("b"));
}

#[test]
fn plots_from_a_finished_run() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("min.toml"), MINIMAL).unwrap();
    assert_eq!(rwrs(&["run", "min.toml", "--run-dir", "out"], tmp.path()).status.code(), Some(0));
    let out = rwrs(&["plots", "out"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("out/plots/00-annealed_variance.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,log_n,quantity,estimate,stderr,target"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1024");
    assert!((first[1].parse::<f64>().unwrap() - 1024f64.ln()).abs() < 1e-12);
}

#[test]
fn plots_on_empty_directory_lists_expected_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = rwrs(&["plots", "."], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("manifest.json") && msg.contains("<index>-<kind>.json"), "{msg}");
}

#[test]
fn invalid_thread_env_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("min.toml"), MINIMAL).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rwrs"))
        .args(["run", "min.toml", "--run-dir", "out"])
        .current_dir(tmp.path())
        .env("RWRS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("RWRS_THREADS"));
}
