use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn otoc(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_otoc"));
    cmd.args(args);
    if let Some(path) = config {
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn repo_config(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn exact_run_prints_metadata_and_rows() {
    let out = otoc(&["exact"], Some(&repo_config("xy4_far.toml")));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# otoc "));
    assert!(text.contains("# config_sha256: "));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 31);
}

#[test]
fn unknown_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[system]\nn_sites = 4\nhamiltonian = \"xy\"\nspin = 1\n").unwrap();
    let out = otoc(&["exact"], Some(&path));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spin"));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = otoc(&["exact"], Some(Path::new("/nonexistent/run.toml")));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_flag_overrides_config_and_out_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = otoc(&["sample", "--quiet", "--seed", "99", "--out", path.to_str().unwrap()], Some(&repo_config("xy4_sample.toml")));
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("# seed: 99\n"));
    assert!(text.contains("# generator: ChaCha20"));
}

#[test]
fn verify_reports_small_residuals() {
    let out = otoc(&["verify", "--instances", "20"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("instances: 20"));
    for line in text.lines().filter(|l| l.starts_with("max_")) {
        let value: f64 = line.split(": ").nth(1).unwrap().parse().unwrap();
        assert!(value < 1e-9, "{line}");
    }
}

#[test]
fn dressing_search_inverts_sign() {
    let out = otoc(&["dressing"], Some(&repo_config("dressing.toml")));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# microwave_search: default grid"));
    assert!(text.lines().filter(|l| l.ends_with(",true")).count() >= 10);
}
