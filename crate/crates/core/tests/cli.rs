use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn freediff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freediff")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(cmd: &str, config: &str, out: &Path) -> Output {
    freediff(&[cmd, "--config", config, "--out", out.to_str().unwrap(), "--seed", "5", "--replicas", "2"])
}

const OU: &str = r#"{"potential": "0.5*X1^2 + 0.5*X2^2", "N": 8, "dt": 0.01, "t_max": 3, "record_stride": 10,
  "norm_cap": 5, "burn_in": 1, "sample_interval": 0.5, "deg_max": 2, "c": 1, "m_bound": 4, "trials": 100}"#;

#[test]
fn grad_prints_both_derivatives() {
    let out = freediff(&["grad", "X1^2", "--index", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2*X1\n1 (x) X1 + X1 (x) 1\n");
    let out = freediff(&["grad", "X2", "-i", "1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next(), Some("0"));
    let out = freediff(&["grad", "X1 +* X2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("1:"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let ou = write_config(dir.path(), "ou.json", OU);
    let code = |o: Output| o.status.code();
    assert_eq!(code(run("simulate", &ou, &out)), Some(0));
    assert_eq!(code(run("couple", &ou, &out)), Some(0));
    assert_eq!(code(run("convexity", &ou, &out)), Some(0));

    let bad_dt = write_config(dir.path(), "bad.json", r#"{"potential": "0.5*X1^2", "dt": -1}"#);
    assert_eq!(code(run("simulate", &bad_dt, &out)), Some(1));
    assert_eq!(code(run("simulate", "/nonexistent/config.json", &out)), Some(1));

    let cubic = write_config(dir.path(), "cubic.json", r#"{"potential": "0.5*X1^2 - X1^3", "N": 2, "c": 1, "m_bound": 10, "trials": 60}"#);
    assert_eq!(code(run("convexity", &cubic, &out)), Some(2));
    let report = fs::read_to_string(out.join("convexity.json")).unwrap();
    assert!(report.contains("\"verdict\": \"refuted\"") && report.contains("\"data\""));

    let deg0 = write_config(dir.path(), "deg0.json", r#"{"potential": "0.5*X1^2", "deg_max": 0}"#);
    assert_eq!(code(run("sd-check", &deg0, &out)), Some(0));
    assert!(fs::read_to_string(out.join("sd_report.json")).unwrap().contains("\"entries\": []"));

    let cold = write_config(dir.path(), "cold.json", r#"{"potential": "0.5*X1^2", "N": 8, "dt": 0.01, "t_max": 0.01, "deg_max": 2}"#);
    assert_eq!(code(run("sd-check", &cold, &out)), Some(2));
    let csv = fs::read_to_string(out.join("sd_report.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("X1,1,") && l.ends_with(",false")));

    let usage = freediff(&["simulate", "--replicas", "many"]);
    assert_eq!(code(usage), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let ou = write_config(dir.path(), "ou.json", OU);
    let snapshot = |tag: &str| {
        let out = dir.path().join(tag);
        for cmd in ["simulate", "sd-check", "couple", "convexity"] {
            run(cmd, &ou, &out);
        }
        let mut files: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let a = snapshot("a");
    let b = snapshot("b");
    assert!(a.len() >= 8);
    assert_eq!(a, b);
}

#[test]
fn csv_floats_have_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let ou = write_config(dir.path(), "ou.json", OU);
    run("simulate", &ou, &out);
    let csv = fs::read_to_string(out.join("trajectory_r1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,norm_max,X1^2,X2^2"));
    let row: Vec<&str> = lines.nth(3).unwrap().split(',').collect();
    for field in row {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(|ch| ch.is_ascii_digit()).count(), 17, "{field}");
    }
    assert!(!csv.contains('\r'));
}
