//! End-to-end tests of the command line surface: exit codes, JSON schema,
//! CSV output, curve input, and output determinism.

use serde_json::Value;
use std::process::{Command, Output};

fn spherepd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherepd"))
        .args(args)
        .env_remove("SPHEREPD_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is valid JSON")
}

#[test]
fn eval_emits_envelope() {
    let out = spherepd(&[
        "eval",
        "--family",
        "multiquadric",
        "--tau",
        "1",
        "--delta",
        "0.5",
        "--grid",
        "9",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["command"], "eval");
    assert_eq!(v["params"]["family"], "multiquadric");
    assert!(v["version"].is_string());
    let values = v["result"]["value"].as_array().unwrap();
    assert_eq!(values.len(), 9);
    assert!(
        (values[0].as_f64().unwrap() - 1.0).abs() < 1e-15,
        "psi(0) = 1"
    );
    assert!(
        (values[8].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-12,
        "psi(pi) = 1/9"
    );
}

#[test]
fn sequence_matches_poisson_kernel() {
    let out = spherepd(&[
        "sequence",
        "--family",
        "multiquadric",
        "--tau",
        "1",
        "--delta",
        "0.3",
        "--dim",
        "1",
        "--n",
        "32",
    ]);
    let v = stdout_json(&out);
    let coeffs = v["result"]["coefficients"].as_array().unwrap();
    let scale = 0.7 / 1.3;
    assert!((coeffs[0].as_f64().unwrap() - scale).abs() < 1e-12);
    for n in 1..8 {
        let expect = 2.0 * 0.3_f64.powi(n) * scale;
        assert!(
            (coeffs[n as usize].as_f64().unwrap() - expect).abs() < 1e-12,
            "b_{n}"
        );
    }
}

#[test]
fn montee_rejection_exits_2_with_reason() {
    let out = spherepd(&["montee", "--family", "custom-cos", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["diagnostics"]["rejection"], "negative-c");
    let c_d = v["diagnostics"]["values"]["c(d)"].as_f64().unwrap();
    assert!((c_d + 0.25).abs() < 1e-8, "c(3) = {c_d}");
    assert!(v["result"].is_null());
}

#[test]
fn descente_curve_matches_raised_tau() {
    let out = spherepd(&[
        "descente",
        "--family",
        "multiquadric",
        "--tau",
        "2",
        "--delta",
        "0.5",
        "--grid",
        "100",
    ]);
    let v = stdout_json(&out);
    let thetas = v["result"]["theta"].as_array().unwrap();
    let values = v["result"]["value"].as_array().unwrap();
    for (t, val) in thetas.iter().zip(values.iter()) {
        let theta = t.as_f64().unwrap();
        let expect = 0.5_f64.powf(6.0) / (1.25 - theta.cos()).powf(3.0);
        assert!(
            (val.as_f64().unwrap() - expect).abs() < 1e-10,
            "theta = {theta}"
        );
    }
}

#[test]
fn check_pd_is_byte_deterministic() {
    let args = [
        "check-pd",
        "--family",
        "wendland-c2",
        "--tau",
        "4",
        "--c",
        "1.5",
        "--dim",
        "3",
        "--seed",
        "5",
    ];
    let a = spherepd(&args);
    let b = spherepd(&args);
    assert!(a.status.success());
    assert_eq!(
        a.stdout, b.stdout,
        "identical argv + seed must be byte-identical"
    );

    let c = spherepd(&[
        "check-pd",
        "--family",
        "wendland-c2",
        "--tau",
        "4",
        "--c",
        "1.5",
        "--dim",
        "3",
        "--seed",
        "6",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_env_variable_is_honored() {
    let with_flag = spherepd(&[
        "check-pd",
        "--family",
        "raised-cosine",
        "--dim",
        "1",
        "--seed",
        "77",
    ]);
    let with_env = Command::new(env!("CARGO_BIN_EXE_spherepd"))
        .args(["check-pd", "--family", "raised-cosine", "--dim", "1"])
        .env("SPHEREPD_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);
}

#[test]
fn to_one_dim_from_seq_file() {
    let dir = std::env::temp_dir().join("spherepd-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("seq.json");
    std::fs::write(
        &path,
        r#"{"dimension":"inf","coefficients":[0.0,0.0,1.0],"tail_mass":0.0}"#,
    )
    .unwrap();
    let out = spherepd(&["to-one-dim", "--seq-file", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    let coeffs = v["result"]["coefficients"].as_array().unwrap();
    // cos^2 = 1/2 + (1/2) cos(2 theta)
    assert!((coeffs[0].as_f64().unwrap() - 0.5).abs() < 1e-14);
    assert!(coeffs[1].as_f64().unwrap().abs() < 1e-14);
    assert!((coeffs[2].as_f64().unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn turning_bands_residuals_are_tiny() {
    let out = spherepd(&[
        "turning-bands",
        "--coeffs",
        "0.4,0.3,0.2,0.1",
        "--dim",
        "2",
        "--grid",
        "60",
    ]);
    let v = stdout_json(&out);
    assert!(v["diagnostics"]["max_down_residual"].as_f64().unwrap() < 1e-10);
    assert!(v["diagnostics"]["max_up_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn probe_smoothness_csv() {
    let out = spherepd(&[
        "probe-smoothness",
        "--family",
        "truncated-linear",
        "--c",
        "1.3",
        "--theta0",
        "1.3",
        "--max-order",
        "2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("order,left,right,gap_fine,converged"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("1,"), "first probed order: {first}");
    assert!(first.ends_with(",false"), "kink order must fail: {first}");
}

#[test]
fn curve_input_analyzes() {
    let dir = std::env::temp_dir().join("spherepd-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let mut text = String::from("theta,value\n");
    for i in 0..=400 {
        let theta = std::f64::consts::PI * i as f64 / 400.0;
        text.push_str(&format!(
            "{:.17e},{:.17e}\n",
            theta,
            0.5 * (1.0 + theta.cos())
        ));
    }
    std::fs::write(&path, text).unwrap();
    let out = spherepd(&[
        "sequence",
        "--curve",
        path.to_str().unwrap(),
        "--dim",
        "3",
        "--n",
        "4",
    ]);
    let v = stdout_json(&out);
    let coeffs = v["result"]["coefficients"].as_array().unwrap();
    assert!((coeffs[0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((coeffs[1].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn verify_suite_runs_clean() {
    let out = spherepd(&["verify", "lemma5.4"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["diagnostics"]["passed"], true);
    let suites = v["result"].as_array().unwrap();
    assert_eq!(suites[0]["suite"], "lemma5.4");
}

#[test]
fn usage_errors_exit_1() {
    let unknown_flag = spherepd(&["eval", "--no-such-flag"]);
    assert_eq!(unknown_flag.status.code(), Some(1));

    let unknown_family = spherepd(&["eval", "--family", "nonexistent"]);
    assert_eq!(unknown_family.status.code(), Some(1));

    let missing_param = spherepd(&["eval", "--family", "multiquadric"]);
    assert_eq!(missing_param.status.code(), Some(1));

    let unknown_suite = spherepd(&["verify", "lemma0.0"]);
    assert_eq!(unknown_suite.status.code(), Some(1));
}

#[test]
fn out_file_is_written() {
    let dir = std::env::temp_dir().join("spherepd-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eval.csv");
    let out = spherepd(&[
        "eval",
        "--family",
        "raised-cosine",
        "--grid",
        "3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("theta,value\n"));
    assert_eq!(text.lines().count(), 4);
}
