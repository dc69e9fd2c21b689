//! End-to-end tests of the `hotgate` binary: exit codes, file outputs and
//! bitwise reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hotgate() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hotgate"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hotgate-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn presets_lists_all_names() {
    let out = hotgate().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    for name in [
        "fig2c", "fig2f", "fig4b", "fig6a", "fig6b", "fig6c", "fig7", "appC", "appD",
    ] {
        assert!(text.contains(name), "missing preset {name} in:\n{text}");
    }
    // Reference parameters shown.
    assert!(text.contains("sigma=3"));
    assert!(text.contains("length_scale=4.78"));
    assert!(text.contains("omega=30"));
}

#[test]
fn run_writes_csv_and_sidecar() {
    let dir = temp_dir("run");
    let config = dir.join("run.toml");
    write(
        &config,
        r#"
preset = "fig2c"
seed = 7

[parameters]
n_a = 3

[grid]
min = 0.05
max = 2.0
points = 12

[output]
name = "curve"
"#,
    );
    let out = hotgate()
        .arg("run")
        .arg(&config)
        .arg("--out")
        .arg(dir.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    let csv = std::fs::read_to_string(dir.join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "delta_t,infidelity_trivial,infidelity_optimized,encoding_a,encoding_b"
    );
    assert_eq!(lines.count(), 12);
    // Encodings are semicolon-joined per-qubit values.
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 5);
    assert_eq!(fields[3].split(';').count(), 3);
    assert_eq!(fields[4].split(';').count(), 1);

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("curve.json")).unwrap()).unwrap();
    assert_eq!(sidecar["seed"], 7);
    assert_eq!(sidecar["resolved_scenario"], "cold_mediator_1d");
    assert_eq!(sidecar["resolved_parameters"]["n_a"], 3.0);
    assert_eq!(sidecar["csv"], "curve.csv");

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn rerun_is_bitwise_identical_including_from_sidecar() {
    let dir = temp_dir("rerun");
    let config = dir.join("run.toml");
    write(
        &config,
        r#"
preset = "fig4b"
seed = 3

[grid]
min = 0.1
max = 5.0
points = 8
"#,
    );
    let run = |out_dir: &Path, cfg: &Path| {
        let out = hotgate()
            .arg("run")
            .arg(cfg)
            .arg("--out")
            .arg(out_dir.to_str().unwrap())
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    };
    let d1 = dir.join("first");
    let d2 = dir.join("second");
    let d3 = dir.join("third");
    run(&d1, &config);
    run(&d2, &config);
    let csv1 = std::fs::read(d1.join("fig4b.csv")).unwrap();
    let csv2 = std::fs::read(d2.join("fig4b.csv")).unwrap();
    assert_eq!(csv1, csv2, "identical config must give identical bytes");

    // Re-run from the embedded sidecar config.
    run(&d3, &d1.join("fig4b.json"));
    let csv3 = std::fs::read(d3.join("fig4b.csv")).unwrap();
    assert_eq!(csv1, csv3, "sidecar re-run must reproduce the record");

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_parameter_exits_2_naming_the_key() {
    let dir = temp_dir("invalid");
    let config = dir.join("bad.toml");
    write(
        &config,
        r#"
preset = "fig2c"

[parameters]
sigma = -1.0

[grid]
min = 0.1
max = 1.0
points = 4
"#,
    );
    let out = hotgate().arg("run").arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("sigma"),
        "stderr must name the key: {}",
        stderr_of(&out)
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn malformed_toml_exits_2_with_line_reference() {
    let dir = temp_dir("parse");
    let config = dir.join("broken.toml");
    write(&config, "preset = \"fig2c\"\nsigma -1\n");
    let out = hotgate().arg("run").arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("line 2"),
        "stderr should reference the line: {}",
        stderr_of(&out)
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn echo_check_prints_residual_and_succeeds() {
    let dir = temp_dir("echo");
    let config = dir.join("echo.toml");
    write(
        &config,
        r#"
scenario = "echo_check"
seed = 42

[parameters]
k = 4
tau = 1.0
instances = 20
"#,
    );
    let out = hotgate()
        .arg("run")
        .arg(&config)
        .arg("--out")
        .arg(dir.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("max residual"), "stdout: {text}");

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("echo_check.json")).unwrap())
            .unwrap();
    let residual = sidecar["echo_max_residual"].as_f64().unwrap();
    assert!(residual < 1e-10);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_preset_exits_2() {
    let out = hotgate()
        .arg("run")
        .arg("--preset")
        .arg("fig99")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("fig99"));
}

#[test]
fn threads_env_var_is_validated() {
    let out = hotgate()
        .env("HOTGATE_THREADS", "zero")
        .arg("presets")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = hotgate()
        .env("HOTGATE_THREADS", "2")
        .arg("presets")
        .output()
        .unwrap();
    assert!(out.status.success());
}
