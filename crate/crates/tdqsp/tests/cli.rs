//! End-to-end tests of the `tdqsp` binary: exit codes, CSV output, and
//! determinism of the emitted data columns.

use std::path::PathBuf;
use std::process::{Command, Output};

fn config_path(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("tdqsp_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdqsp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_columns(csv: &str) -> Vec<String> {
    // Everything except the trailing runtime_ms column, which is wall-clock
    // metadata and legitimately differs between runs.
    csv.lines()
        .map(|line| {
            let mut cols: Vec<&str> = line.split(',').collect();
            cols.pop();
            cols.join(",")
        })
        .collect()
}

#[test]
fn simulate_lattice_succeeds_within_eps() {
    let out_csv = scratch("lattice.csv");
    let output = run(&[
        "simulate",
        "--config",
        &config_path("lattice_n3.json"),
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 12);
    assert!(header.starts_with("model,n,t,eps,error_vs_expm"));
    assert!(header.ends_with("commuting_pass,runtime_ms"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "lattice");
    assert_eq!(row[1], "3");
    let err: f64 = row[4].parse().unwrap();
    assert!(err <= 1e-6, "error_vs_expm {err}");
    assert_eq!(row[10], "true");
}

#[test]
fn simulate_is_deterministic_modulo_runtime() {
    let a_csv = scratch("det_a.csv");
    let b_csv = scratch("det_b.csv");
    for (path, _) in [(&a_csv, 0), (&b_csv, 1)] {
        let output = run(&[
            "simulate",
            "--config",
            &config_path("lattice_n3.json"),
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    let a = std::fs::read_to_string(&a_csv).unwrap();
    let b = std::fs::read_to_string(&b_csv).unwrap();
    assert_eq!(data_columns(&a), data_columns(&b));
}

#[test]
fn simulate_zero_time_is_exact() {
    let config = std::fs::read_to_string(config_path("lattice_n3.json"))
        .unwrap()
        .replace("\"t\": 0.8", "\"t\": 0.0");
    let cfg_path = scratch("zero_time.json");
    std::fs::write(&cfg_path, config).unwrap();
    let out_csv = scratch("zero_time.csv");
    let output = run(&[
        "simulate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let err_expm: f64 = row[4].parse().unwrap();
    let err_ord: f64 = row[5].parse().unwrap();
    assert!(err_expm <= 1e-12 && err_ord <= 1e-12);
}

#[test]
fn noncommuting_without_force_exits_3() {
    let config = std::fs::read_to_string(config_path("ising_quench.json"))
        .unwrap()
        .replace("\"force_noncommuting\": true", "\"force_noncommuting\": false");
    let cfg_path = scratch("unforced_quench.json");
    std::fs::write(&cfg_path, config).unwrap();
    let output = run(&[
        "simulate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        scratch("unforced_quench.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("commutativity"), "stderr: {stderr}");
}

#[test]
fn malformed_config_exits_2() {
    let cfg_path = scratch("broken.json");
    std::fs::write(&cfg_path, "{ not json").unwrap();
    let output = run(&[
        "simulate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        scratch("broken.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_key_exits_2() {
    let config = std::fs::read_to_string(config_path("lattice_n3.json"))
        .unwrap()
        .replace("\"t\": 0.8", "\"t\": 0.8, \"surprise\": 1");
    let cfg_path = scratch("unknown_key.json");
    std::fs::write(&cfg_path, config).unwrap();
    let output = run(&[
        "simulate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        scratch("unknown_key.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_lattice_exits_0() {
    let output = run(&["verify", "--config", &config_path("lattice_n3.json")]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("commuting: true"));
}

#[test]
fn verify_broken_floquet_pairing_exits_3() {
    // H_{-1} deliberately not the adjoint of H_1.
    let config = std::fs::read_to_string(config_path("floquet_2q.json"))
        .unwrap()
        .replace(
            "\"-1\": [\n        [[0.2, 0], [0, 0], [0, 0], [0, 0]],",
            "\"-1\": [\n        [[0.15, 0], [0, 0], [0, 0], [0, 0]],",
        );
    let cfg_path = scratch("broken_floquet.json");
    std::fs::write(&cfg_path, config).unwrap();
    let output = run(&["verify", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn sweep_eps_rows_in_order_with_monotone_encoding_uses() {
    let out_csv = scratch("sweep_eps.csv");
    let output = run(&[
        "sweep",
        "--config",
        &config_path("lattice_n3.json"),
        "--param",
        "eps",
        "--values",
        "1e-3,1e-5,1e-7",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    let eps_col: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(eps_col, vec![1e-3, 1e-5, 1e-7]);
    let enc: Vec<u64> = rows.iter().map(|r| r[7].parse().unwrap()).collect();
    assert!(enc.windows(2).all(|w| w[0] <= w[1]), "encoding uses not monotone: {enc:?}");
}

#[test]
fn sweep_empty_values_writes_header_only() {
    let out_csv = scratch("sweep_empty.csv");
    let output = run(&[
        "sweep",
        "--config",
        &config_path("lattice_n3.json"),
        "--param",
        "eps",
        "--values",
        "",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("model,n,t,eps"));
}

#[test]
fn sweep_steps_runs_trotter_baseline_with_halving_error() {
    let out_csv = scratch("sweep_steps.csv");
    let output = run(&[
        "sweep",
        "--config",
        &config_path("ising_quench.json"),
        "--param",
        "steps",
        "--values",
        "64,128,256",
        "--out",
        out_csv.to_str().unwrap(),
        "--oracle-steps",
        "20000",
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let errs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 3);
    for pair in errs.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((1.5..=2.5).contains(&ratio), "ratio {ratio:.2} from {errs:?}");
    }
    // Ledger columns are zero for the classical baseline rows.
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&first[6..10], &["0", "0", "0", "0"]);
}

#[test]
fn mode_flag_overrides_config() {
    let out_csv = scratch("mfold.csv");
    let output = run(&[
        "simulate",
        "--config",
        &config_path("lattice_n3.json"),
        "--out",
        out_csv.to_str().unwrap(),
        "--mode",
        "m-fold",
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let err: f64 = row[4].parse().unwrap();
    assert!(err <= 1e-6, "m-fold error {err}");
}

#[test]
fn missing_output_path_is_config_error() {
    let config = std::fs::read_to_string(config_path("lattice_n3.json"))
        .unwrap()
        .replace(",\n  \"output_path\": \"lattice_n3_result.csv\"\n", "\n");
    let cfg_path = scratch("no_out.json");
    std::fs::write(&cfg_path, config).unwrap();
    let output = run(&["simulate", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}
