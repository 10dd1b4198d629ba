use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confdist")).args(args).env_remove("CONFDIST_OUTPUT_DIR").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str]) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let actual = stdout(args);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "output of {args:?} differs from {}", path.display());
}

#[test]
fn golden_assess() {
    golden("assess.csv", &["assess", "--d", "1", "--sigma", "1", "--R", "2", "--k", "2"]);
    golden("assess_sigma100.csv", &["assess", "--d", "1", "--sigma", "100", "--R", "2"]);
}

#[test]
fn golden_ci() {
    golden("ci.csv", &["ci", "--d", "2", "--alpha", "0.9", "--beta", "0.05", "--sigma", "1"]);
    golden("ci_closed.csv", &["ci", "--d", "0.2", "--closed"]);
}

#[test]
fn golden_cd() {
    golden("cd.csv", &["cd", "--d", "0.2", "--sigma", "1", "--theta", "0,0.5,1,2"]);
}

#[test]
fn golden_posterior_and_belief() {
    golden("posterior.json", &["posterior", "--d", "1", "--method", "reference", "--theta", "1,2", "--format", "json"]);
    golden("belief.csv", &["belief", "--d", "3", "--R", "2", "--base", "up"]);
}

#[test]
fn golden_sim_and_figures() {
    golden("sim_coverage.csv", &["sim", "coverage", "--theta0", "0,1", "--sigma", "1,5", "--reps", "400", "--seed", "3"]);
    golden("figure_ci.csv", &["figures", "ci"]);
}

#[test]
fn headline_values() {
    let assess = stdout(&["assess", "--d", "1", "--sigma", "1", "--R", "2", "--k", "2"]);
    let row: Vec<&str> = assess.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[4..7], ["0.918108", "0.730988", "0.890801"]);
    let ci = stdout(&["ci", "--d", "2", "--alpha", "0.9", "--beta", "0.05", "--sigma", "1"]);
    assert!(ci.lines().nth(1).unwrap().ends_with("one-sided,0,3.45164,0.95"));
    let cd = stdout(&["cd", "--d", "0.2", "--sigma", "1", "--theta", "0"]);
    assert!(cd.lines().nth(1).unwrap().ends_with(",0.980199"));
    let fig = stdout(&["figures", "ci"]);
    for t in ["2.44775", "1.44901", "0.320291"] {
        assert!(fig.contains(&format!(",{t},")), "missing threshold {t}");
    }
}

#[test]
fn json_mirrors_csv() {
    let json = stdout(&["ci", "--d", "0.2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let row = &v[0];
    assert_eq!(row["kind"], "empty");
    assert_eq!(row["upper"], 0.0);
    assert_eq!(row["confidence_display"], "0.980199");
    let keys: Vec<&String> = row.as_object().unwrap().keys().collect();
    assert_eq!(keys[0], "d");
    assert_eq!(keys[1], "d_display");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["ci", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["ci"]).status.code(), Some(2));
    assert_eq!(run(&["ci", "--d", "2", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["cd", "--y", "1,2", "--k", "3"]).status.code(), Some(2));
    assert_eq!(run(&["figures", "nonexistent"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["assess", "--d", "1", "--R", "2", "-o", "/proc/forbidden/x.csv"]).status.code(), Some(1));
}

#[test]
fn reproducible_across_backends() {
    let args = ["sim", "collision", "--theta0", "1", "--sigma", "20", "--reps", "2000", "--seed", "9"];
    let a = stdout(&args);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(a, stdout(&seq));
    assert_eq!(a, stdout(&args));
    let mut other = args.to_vec();
    other[9] = "10";
    assert_ne!(a, stdout(&other));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_confdist"))
        .args(["assess", "--d", "1", "--R", "2"])
        .env("CONFDIST_OUTPUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let written = std::fs::read_to_string(dir.path().join("assess.csv")).unwrap();
    assert!(written.starts_with("d,sigma,k,R,C,G,RP,Bel,Bel_G,point_mass\n"));

    let status = Command::new(env!("CARGO_BIN_EXE_confdist"))
        .args(["ci", "--d", "2", "--format", "json", "-o", "nested/ci.json"])
        .env("CONFDIST_OUTPUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("nested/ci.json").exists());
}
