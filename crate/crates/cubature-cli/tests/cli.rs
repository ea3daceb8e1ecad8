//! End-to-end checks of the command-line surface: flag validation and
//! exit codes, JSON output, reproducibility and the CSV mesh format.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubature"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is valid JSON")
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

const CALL_1D: &str = r#"{
    "spots": [50.0], "vols": [0.2], "rate": 0.05, "maturity": 1.0,
    "correlation": {"rho": 0.0}, "weights": [1.0], "strike": 45.0,
    "payoff": "basket_call"
}"#;

#[test]
fn help_documents_every_subcommand_and_flag() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["price", "delta", "cv", "mesh", "table", "--threads"] {
        assert!(text.contains(needle), "help misses {needle}");
    }
    let price_help = run(&["price", "--help"]);
    let text = String::from_utf8_lossy(&price_help.stdout);
    for needle in [
        "--config",
        "--preset",
        "--strategy",
        "--iters",
        "--q1",
        "--q2",
        "--alpha",
        "--A",
        "--runs",
        "--seed",
        "--out",
    ] {
        assert!(text.contains(needle), "price help misses {needle}");
    }
}

#[test]
fn unknown_flags_and_bad_configs_exit_2() {
    assert_eq!(run(&["price", "--nonsense"]).status.code(), Some(2));
    assert_eq!(
        run(&["price", "--preset", "no-such-preset"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["price", "--config", "/definitely/not/here.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["table", "t99"]).status.code(), Some(2));
    assert_eq!(
        run(&["table", "t1", "--scale", "1.5"]).status.code(),
        Some(2)
    );
    // Either --config or --preset is required.
    assert_eq!(run(&["price"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", "{\"spots\": [50.0]");
    assert_eq!(run(&["price", "--config", &bad]).status.code(), Some(2));

    // Correlation outside the admissible range is a config error.
    let out_of_range = write_config(
        dir.path(),
        "rho.json",
        r#"{"spots": [50.0, 50.0, 50.0], "vols": [0.2, 0.2, 0.2], "rate": 0.05,
            "maturity": 1.0, "correlation": {"rho": -0.5}, "strike": 45.0,
            "payoff": "basket_call"}"#,
    );
    assert_eq!(
        run(&["price", "--config", &out_of_range]).status.code(),
        Some(2)
    );
}

#[test]
fn non_finite_integrand_exits_3() {
    // An absurd rate overflows the terminal price to infinity; the payoff
    // times the vanishing density becomes NaN, a numerical failure.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "overflow.json",
        r#"{"spots": [50.0], "vols": [0.2], "rate": 1.0e308, "maturity": 1.0,
            "correlation": {"rho": 0.0}, "strike": 45.0, "payoff": "basket_call"}"#,
    );
    let out = run(&[
        "price", "--config", &cfg, "--iters", "50", "--q1", "8", "--q2", "12",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_asset_index_exits_2() {
    assert_eq!(
        run(&["delta", "--preset", "ex13", "--asset", "7", "--iters", "50"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn price_output_is_reproducible_byte_for_byte() {
    let args = [
        "price", "--preset", "ex1", "--iters", "60", "--runs", "3", "--seed", "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn degenerate_constant_payoff_prices_exactly() {
    // Zero weights make the basket put pay the strike everywhere.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "const.json",
        r#"{"spots": [50.0, 50.0], "vols": [0.2, 0.2], "rate": 0.05,
            "maturity": 1.0, "correlation": {"rho": 0.1},
            "weights": [0.0, 0.0], "strike": 45.0, "payoff": "basket_put"}"#,
    );
    let out = run(&[
        "price", "--config", &cfg, "--iters", "800", "--q1", "8", "--q2", "12",
    ]);
    let body = stdout_json(&out);
    let expected = 45.0 * (-0.05f64).exp();
    assert!((body["price"].as_f64().unwrap() - expected).abs() < 1e-9);
    assert!(body["error_indicator"].as_f64().unwrap() < 1e-6);
}

#[test]
fn one_dimensional_delta_includes_the_closed_form_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "call1d.json", CALL_1D);
    let out = run(&[
        "delta",
        "--config",
        &cfg,
        "--q1",
        "8",
        "--q2",
        "12",
        "--iters",
        "200",
        "--mc-samples",
        "20000",
    ]);
    let body = stdout_json(&out);
    let interp = body["delta_interp"].as_f64().unwrap();
    let closed = body["closed_form_delta"].as_f64().unwrap();
    assert!((interp - closed).abs() < 1e-4);
    assert!(body["delta_mc_fd"].is_number());
}

#[test]
fn cv_with_all_components_has_zero_interval() {
    let out = run(&[
        "cv",
        "--preset",
        "ex17",
        "--components",
        "5",
        "--samples",
        "4000",
        "--q1",
        "2",
        "--q2",
        "4",
        "--iters",
        "40",
        "--A",
        "6",
    ]);
    let body = stdout_json(&out);
    let result = &body["results"][0];
    assert_eq!(result["ci_half_width"].as_f64().unwrap(), 0.0);
    assert_eq!(
        result["value"].as_f64().unwrap(),
        result["control_value"].as_f64().unwrap()
    );
    assert!(result["variance_ratio"].is_null());
}

#[test]
fn mesh_export_writes_the_documented_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("mesh.csv");
    let out = run(&[
        "mesh",
        "--preset",
        "ex1",
        "--iters",
        "40",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    let body = stdout_json(&out);
    assert_eq!(body["regions"].as_u64().unwrap(), 41);

    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lo_1,lo_2,hi_1,hi_2,indicator,estimate"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 41);
    let mut volume = 0.0;
    for row in rows {
        let f: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        volume += (f[2] - f[0]) * (f[3] - f[1]);
    }
    assert!((volume - 576.0).abs() < 1e-9);
}

#[test]
fn thread_cap_flag_and_env_are_accepted() {
    let out = bin()
        .args([
            "price",
            "--preset",
            "ex1",
            "--iters",
            "30",
            "--threads",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin()
        .args(["price", "--preset", "ex1", "--iters", "30"])
        .env("CUBATURE_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        bin()
            .args(["price", "--preset", "ex1", "--threads", "0"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
}
