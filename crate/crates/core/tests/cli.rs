use std::io::Write;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_cavityio");

const SWEEP: &str = r#"
quantity = "zeta"

[cavity]
length_over_c = 1.0
reflectance = 0.5

[parameters]
x = 0.3

[[sweep]]
variable = "y"
start = 0.0
stop = 6.283185307179586
count = 40
endpoint = false

[[sweep]]
variable = "z"
start = 0.0
stop = 3.0
count = 25
"#;

fn run(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("CAVITYIO_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sweep_bytes_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "sweep.toml", SWEEP);
    let one = run(&["sweep", "--config", &cfg, "--threads", "1"], None, &[]);
    let many = run(&["sweep", "--config", &cfg, "--threads", "8"], None, &[]);
    let env = run(&["sweep", "--config", &cfg], None, &[("CAVITYIO_THREADS", "3")]);
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, env.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,z,ratio,p_rr,p_rl,p_ll,flags"));
    assert_eq!(lines.count(), 40 * 25);
}

#[test]
fn threads_flag_wins_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "sweep.toml", SWEEP);
    let out = run(&["sweep", "--config", &cfg, "--threads", "2"], None, &[("CAVITYIO_THREADS", "0")]);
    assert!(out.status.success());
    // the environment value alone is invalid
    let out = run(&["sweep", "--config", &cfg], None, &[("CAVITYIO_THREADS", "0")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_length_is_a_config_error() {
    let out = run(&["matrices", "--config", "-"], Some("[cavity]\nreflectance = 0.5\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cavity") && err.contains("length_over_c"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unusable_state_is_a_numeric_error() {
    let cfg = "[cavity]\nlength_over_c = 1.0\nreflectance = 0.0\n[parameters]\nx = 0.0\n[state]\nc_ll = 1.0\n";
    let out = run(&["two-photon", "--config", "-"], Some(cfg), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn json_on_stdin_and_report_object() {
    let cfg = r#"{"cavity": {"length_over_c": 1.0, "reflectance": 0.7}, "parameters": {"x": 1.2}, "state": {"basis": "n+"}}"#;
    let out = run(&["two-photon", "--config", "-"], Some(cfg), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["ratio_1"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert!((v["p_rl"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["p_rr"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn output_file_and_grid_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "m.toml",
        "[cavity]\nlength_over_c = 1.0\nreflectance = 0.9\n[omega]\nstart = 0.0\nstop = 6.0\ncount = 10\n",
    );
    let target = dir.path().join("m.csv");
    let target = target.to_str().unwrap();
    let out = run(&["matrices", "--config", &cfg, "--grid", "33", "--output", target], None, &[]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    assert_eq!(text.lines().count(), 34);
}

#[test]
fn gram_report_and_usage_errors() {
    let cfg = "[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n[parameters]\nx = 0.0\n";
    let out = run(&["gram", "--config", "-"], Some(cfg), &[]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["rho"].as_f64().unwrap() + 0.9428090415820634).abs() < 1e-12);
    assert_eq!(v["basis_vectors"]["n0"][1], 0.0);

    assert_eq!(run(&["bogus"], None, &[]).status.code(), Some(2));
    assert_eq!(run(&["sweep"], None, &[]).status.code(), Some(2));
    assert_eq!(run(&["--help"], None, &[]).status.code(), Some(0));
}
