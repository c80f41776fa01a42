//! End-to-end tests of the binary: exit codes, output formats, fixture
//! round-trips, and the determinism acceptance check.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_biphoton"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn criterion_10_determinism_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut spectra = Vec::new();
    let mut validates = Vec::new();
    for (i, threads) in ["1", "4", "1"].iter().enumerate() {
        let csv = dir.path().join(format!("run{i}.csv"));
        let out = run(&[
            "simulate",
            "--fixture",
            "fig1a",
            "--threads",
            threads,
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        spectra.push(fs::read(&csv).unwrap());

        let v = run(&["validate", "--threads", threads]);
        assert!(v.status.success(), "{v:?}");
        validates.push(v.stdout);
    }
    assert_eq!(spectra[0], spectra[1], "[criterion 10] FAIL simulate differs across threads");
    assert_eq!(spectra[0], spectra[2], "[criterion 10] FAIL simulate differs across runs");
    assert_eq!(validates[0], validates[1], "[criterion 10] FAIL validate differs across threads");
    assert_eq!(validates[0], validates[2], "[criterion 10] FAIL validate differs across runs");
    println!(
        "[criterion 10] PASS determinism: byte-identical simulate ({} bytes) and validate \
         ({} bytes) across runs and thread counts",
        spectra[0].len(),
        validates[0].len()
    );
}

#[test]
fn simulate_fixture_writes_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig1a.csv");
    let out = run(&["simulate", "--fixture", "fig1a", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega_over_c_um_inv,wavelength_um,density_norm"
    );
    assert_eq!(text.lines().count(), 8002);
    assert!(!text.contains('\r'));
}

#[test]
fn simulate_jsonl_mirror_has_same_rows() {
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("fig2a.jsonl");
    let out = run(&[
        "simulate",
        "--fixture",
        "fig2a",
        "--format",
        "jsonl",
        "--out",
        jsonl.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&jsonl).unwrap();
    assert_eq!(text.lines().count(), 8001);
    assert!(text.lines().next().unwrap().starts_with("{\"omega_over_c_um_inv\":"));
}

#[test]
fn emitted_fixture_config_reproduces_fixture_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["fixtures", "--dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    for name in ["fig1a", "fig3d"] {
        let cfg = dir.path().join(format!("{name}.toml"));
        assert!(cfg.exists());
        let from_fixture = dir.path().join(format!("{name}_fx.csv"));
        let from_config = dir.path().join(format!("{name}_cfg.csv"));
        assert!(run(&[
            "simulate",
            "--fixture",
            name,
            "--out",
            from_fixture.to_str().unwrap()
        ])
        .status
        .success());
        assert!(run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            from_config.to_str().unwrap()
        ])
        .status
        .success());
        assert_eq!(
            fs::read(&from_fixture).unwrap(),
            fs::read(&from_config).unwrap(),
            "{name}: config round-trip not byte-identical"
        );
    }
}

#[test]
fn factor_command_reports_accepted_pair() {
    let out = run(&["factor", "--n", "15", "--m", "3"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("accepted: 3 5"), "{text}");

    let out = run(&["factor", "--n", "13", "--m", "8"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("accepted: none"));
}

#[test]
fn exit_codes_distinguish_error_classes() {
    // Config error: malformed TOML.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[structure\nkind = \"photonic\"").unwrap();
    let out = run(&["simulate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    // Config error: unknown fixture.
    let out = run(&["simulate", "--fixture", "nope"]);
    assert_eq!(out.status.code(), Some(2));

    // Numeric-domain error: grid beyond the signal branch.
    let numeric = dir.path().join("numeric.toml");
    fs::write(
        &numeric,
        r#"
[structure]
kind = "photonic"
n_layers = 2
layer_len = 100.0
alpha = 0.0

[dispersion]
lambda0 = 0.458
b_walkoff = 0.3

[grid]
min = -0.1
max = 7.0
n_points = 100
"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", numeric.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");

    // I/O error: output path under a regular file.
    let file = dir.path().join("plain.txt");
    fs::write(&file, "x").unwrap();
    let under_file = file.join("sub").join("out.csv");
    let out = run(&[
        "simulate",
        "--fixture",
        "fig1a",
        "--out",
        under_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
}

#[test]
fn env_var_overrides_thread_flag() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = bin()
        .args(["simulate", "--fixture", "fig2a", "--threads", "4", "--out"])
        .arg(&a)
        .env("BIPHOTON_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = run(&["simulate", "--fixture", "fig2a", "--out", b.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let out = bin()
        .args(["validate", "--fixture", "fig1a"])
        .env("BIPHOTON_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn peaks_command_tables_predicted_and_detected() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("peaks.csv");
    let out = run(&[
        "peaks",
        "--fixture",
        "fig1a",
        "--threshold",
        "0.1",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("predicted,")).count(), 5);
    assert_eq!(text.lines().filter(|l| l.starts_with("detected,")).count(), 5);
}

#[test]
fn peaks_on_aperiodic_fixture_detects_only() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("fig3d.csv");
    let out = run(&[
        "peaks",
        "--fixture",
        "fig3d",
        "--threshold",
        "0.5",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("predicted,")).count(), 0);
    assert!(text.lines().filter(|l| l.starts_with("detected,")).count() >= 1);
}

#[test]
fn sweep_and_optimize_run_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        r#"
[structure]
kind = "photonic"
n_layers = 5
total_len = 8000.0
alpha = 1.2e-5

[dispersion]
lambda0 = 0.458
b_walkoff = 0.3
dk0 = 0.0576

[sweep]
param = "n_layers"
values = [5.0, 10.0, 2.5]
objectives = ["max_density"]

[optimize]
n_layers = 4
total_len = 400.0
"#,
    )
    .unwrap();
    let table = dir.path().join("sweep.csv");
    let out = run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", table.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().last().unwrap().contains("not a positive integer"));

    let trace = dir.path().join("trace.csv");
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout_of(&out).starts_with("best zeta = "));
    assert!(fs::read_to_string(&trace).unwrap().starts_with("zeta_um,objective"));
}

#[test]
fn validate_single_fixture_and_unknown() {
    let out = run(&["validate", "--fixture", "fig2b"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("fig2b"));

    let out = run(&["validate", "--fixture", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixture_configs_parse_back_and_flag_notes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["fixtures", "--dir", dir.path().to_str().unwrap()]).status.success());
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 12);
    let fig3a = fs::read_to_string(dir.path().join("fig3a.toml")).unwrap();
    assert!(fig3a.starts_with("# fig3a:"), "note comment expected");
    assert!(Path::new(&dir.path().join("fig2a.toml")).exists());
}
