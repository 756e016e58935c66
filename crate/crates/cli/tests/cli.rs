//! End-to-end tests of the installed binary: artifact layout, exit codes,
//! determinism of the written CSVs, and the selftest failure hook.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_secbeam"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("failed to launch binary")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process killed by signal")
}

/// Small, quick scenario: full physics, reduced dimensions.
const SMALL_CONFIG: &str = "\
num_antennas = 8
num_rf_chains = 3
num_users = 2
num_eves = 2
power_dbm = 10.0
noise_ut_dbm = -120.0
noise_eve_dbm = -120.0
path_loss_db = -120.0
num_realizations = 3
rng_seed = 5
schemes = [\"pdd\", \"so\", \"mrt\"]
pdd_rho_init = 0.012
pdd_outer_max_iters = 80
";

#[test]
fn run_writes_artifacts_and_repeats_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    fs::write(&config, SMALL_CONFIG).unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");

    for out_dir in [&out_a, &out_b] {
        let out = run_in(
            dir.path(),
            &[
                "run",
                "--config",
                config.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
            ],
        );
        assert_eq!(
            exit_code(&out),
            0,
            "run failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    for name in ["wssr_vs_sweep.csv", "pdd_trace.csv", "run_meta.json"] {
        assert!(out_a.join(name).is_file(), "missing artifact {name}");
    }
    for name in ["wssr_vs_sweep.csv", "pdd_trace.csv"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    let table = fs::read_to_string(out_a.join("wssr_vs_sweep.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next(),
        Some("sweep_value,scheme,mean_wssr,stderr,n_ok,n_fail")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3, "one row per scheme expected:\n{table}");
    for scheme in ["pdd", "so", "mrt"] {
        assert!(
            rows.iter().any(|r| r.contains(&format!(",{scheme},"))),
            "no row for scheme {scheme}:\n{table}"
        );
    }

    // Trace rows exist for the three realizations and parse as numbers.
    let trace = fs::read_to_string(out_a.join("pdd_trace.csv")).unwrap();
    let data_rows: Vec<&str> = trace.lines().skip(1).collect();
    assert!(!data_rows.is_empty(), "empty trace file");
    for row in &data_rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 5, "bad trace row: {row}");
        fields[3].parse::<f64>().expect("objective not numeric");
        fields[4].parse::<f64>().expect("violation not numeric");
    }

    let meta = fs::read_to_string(out_a.join("run_meta.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&meta).unwrap();
    assert_eq!(parsed["rng_seed"], 5);
    assert_eq!(parsed["spec"]["cfg"]["num_antennas"], 8);
}

#[test]
fn rf_sweep_override_produces_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    fs::write(&config, SMALL_CONFIG).unwrap();
    let out_dir = dir.path().join("out");

    let out = run_in(
        dir.path(),
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--sweep",
            "rf",
            "--values",
            "2,3",
            "--schemes",
            "so,mrt",
            "--realizations",
            "2",
            "--out",
            out_dir.to_str().unwrap(),
        ],
    );
    assert_eq!(
        exit_code(&out),
        0,
        "run failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let table = fs::read_to_string(out_dir.join("wssr_vs_sweep.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 4, "2 RF counts x 2 schemes expected:\n{table}");
    for value in ["2.00000000000e0", "3.00000000000e0"] {
        for scheme in ["so", "mrt"] {
            assert!(
                rows.iter()
                    .any(|r| r.starts_with(&format!("{value},{scheme},"))),
                "missing cell {value}/{scheme}:\n{table}"
            );
        }
    }
}

#[test]
fn unknown_config_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    fs::write(&config, "num_antennaz = 8\n").unwrap();
    let out = run_in(dir.path(), &["run", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("unknown field") && stderr.contains("num_antennaz"),
        "unhelpful error: {stderr}"
    );
}

#[test]
fn infeasible_dimensions_are_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    fs::write(
        &config,
        "num_antennas = 4\nnum_rf_chains = 6\nnum_realizations = 1\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn missing_config_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "--config", "does-not-exist.toml"]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("does-not-exist.toml"), "stderr: {stderr}");
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn unknown_scheme_override_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    fs::write(&config, SMALL_CONFIG).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--schemes",
            "pdd,zf",
        ],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn selftest_passes_and_corrupt_hook_fails_one_property() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["selftest"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(exit_code(&out), 0, "selftest failed:\n{stdout}");
    assert!(stdout.contains("surrogate-identity"), "stdout: {stdout}");
    assert!(!stdout.contains("FAIL"), "stdout: {stdout}");

    let out = run_in(dir.path(), &["selftest", "--corrupt", "power-solver"]);
    assert_eq!(exit_code(&out), 3, "corrupt hook did not fail the run");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("FAIL power-solver"),
        "stdout: {stdout}"
    );
}
