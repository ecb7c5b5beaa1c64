//! End-to-end tests that drive the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bosonsim::io;
use bosonsim::matrix::ComplexMatrix;
use bosonsim::modes::ModeConfig;
use bosonsim::unitary::{Interferometer, Provenance};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosonsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary should run")
}

fn assert_code(out: &Output, expected: i32) {
    assert_eq!(
        out.status.code(),
        Some(expected),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn gen_unitary_haar_is_valid_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen-unitary", "--modes", "6", "--seed", "9", "--out", "u.json"],
    );
    assert_code(&out, 0);
    let u = io::load_unitary(dir.path().join("u.json")).unwrap();
    assert_eq!(u.modes(), 6);
    assert!(u.unitarity_residual() < 1e-12);

    let out = run_in(
        dir.path(),
        &["gen-unitary", "--modes", "6", "--seed", "9", "--out", "u2.json"],
    );
    assert_code(&out, 0);
    let a = fs::read(dir.path().join("u.json")).unwrap();
    let b = fs::read(dir.path().join("u2.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gen_unitary_random_phases_then_mesh_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "gen-unitary",
            "--kind",
            "random-phases",
            "--modes",
            "5",
            "--layers",
            "2",
            "--seed",
            "3",
            "--out",
            "net.json",
        ],
    );
    assert_code(&out, 0);
    let u = io::load_unitary(dir.path().join("net.json")).unwrap();
    let circuit = io::load_circuit(dir.path().join("net.circuit.json")).unwrap();
    assert_eq!(circuit.modes(), 5);

    let out = run_in(
        dir.path(),
        &[
            "gen-unitary",
            "--kind",
            "reck-of=net.json",
            "--out",
            "mesh.circuit.json",
        ],
    );
    assert_code(&out, 0);
    let mesh = io::load_circuit(dir.path().join("mesh.circuit.json")).unwrap();
    let recomposed = bosonsim::circuit::compose(&mesh).unwrap();
    let residual = recomposed.matrix().max_abs_diff(u.matrix()).unwrap();
    assert!(residual < 1e-10, "residual {residual}");
}

#[test]
fn sample_writes_reproducible_logs() {
    let dir = tempfile::tempdir().unwrap();
    assert_code(
        &run_in(
            dir.path(),
            &["gen-unitary", "--modes", "5", "--seed", "1", "--out", "u.json"],
        ),
        0,
    );
    let sample = |out_name: &str, seed: &str| {
        run_in(
            dir.path(),
            &[
                "sample",
                "--unitary",
                "u.json",
                "--input",
                "1 2 3",
                "--events",
                "50",
                "--seed",
                seed,
                "--out",
                out_name,
                "--distribution",
                "dist.csv",
            ],
        )
    };
    assert_code(&sample("log.csv", "4"), 0);
    let text = fs::read_to_string(dir.path().join("log.csv")).unwrap();
    assert_eq!(text.lines().count(), 51);
    assert!(text.starts_with("index,modes\n"));

    let input = ModeConfig::new(vec![1, 2, 3], 5).unwrap();
    let log = io::load_event_log(dir.path().join("log.csv"), &input).unwrap();
    assert_eq!(log.len(), 50);

    // The manifest is written automatically next to the event log.
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("log.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "sample");
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["parameters"]["input"], "1 2 3");
    assert!(manifest["finished_unix"].as_u64().unwrap() >= manifest["started_unix"].as_u64().unwrap());
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|o| o.as_str().unwrap().contains("log.csv")));
    assert!(outputs.iter().any(|o| o.as_str().unwrap().contains("dist.csv")));

    assert_code(&sample("log2.csv", "4"), 0);
    assert_eq!(
        fs::read(dir.path().join("log.csv")).unwrap(),
        fs::read(dir.path().join("log2.csv")).unwrap()
    );
    assert_code(&sample("log3.csv", "5"), 0);
    assert_ne!(
        fs::read(dir.path().join("log.csv")).unwrap(),
        fs::read(dir.path().join("log3.csv")).unwrap()
    );
}

#[test]
fn occupation_style_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    assert_code(
        &run_in(
            dir.path(),
            &["gen-unitary", "--modes", "5", "--seed", "1", "--out", "u.json"],
        ),
        0,
    );
    assert_code(
        &run_in(
            dir.path(),
            &[
                "sample",
                "--unitary",
                "u.json",
                "--input",
                "0 1 1 1 0",
                "--events",
                "5",
                "--seed",
                "0",
                "--out",
                "log.csv",
            ],
        ),
        0,
    );
    // Same photons via mode indices: identical events.
    assert_code(
        &run_in(
            dir.path(),
            &[
                "sample",
                "--unitary",
                "u.json",
                "--input",
                "1,2,3",
                "--events",
                "5",
                "--seed",
                "0",
                "--out",
                "log2.csv",
            ],
        ),
        0,
    );
    assert_eq!(
        fs::read(dir.path().join("log.csv")).unwrap(),
        fs::read(dir.path().join("log2.csv")).unwrap()
    );
}

#[test]
fn validate_exit_codes_track_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    assert_code(
        &run_in(
            dir.path(),
            &["gen-unitary", "--modes", "9", "--seed", "12", "--out", "u.json"],
        ),
        0,
    );
    let sample = |source: &str, out_name: &str| {
        assert_code(
            &run_in(
                dir.path(),
                &[
                    "sample",
                    "--unitary",
                    "u.json",
                    "--input",
                    "3 4 5",
                    "--source",
                    source,
                    "--events",
                    "400",
                    "--seed",
                    "7",
                    "--out",
                    out_name,
                ],
            ),
            0,
        );
    };
    let validate = |test: &str, log: &str, report: &str| {
        let args = vec![
            "validate", "--unitary", "u.json", "--input", "3 4 5", "--log", log, "--test", test,
            "--out", report,
        ];
        run_in(dir.path(), &args)
    };

    sample("indistinguishable", "bs.csv");
    sample("uniform", "uniform.csv");
    sample("distinguishable", "dis.csv");

    assert_code(&validate("aa", "bs.csv", "report.csv"), 0);
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.starts_with("index,modes,statistic,decision,cumulative,test\n"));
    assert_eq!(report.lines().count(), 402);
    assert!(report.lines().last().unwrap().starts_with("final,,,boson-sampler"));

    assert_code(&validate("aa", "uniform.csv", "r2.csv"), 10);
    assert_code(&validate("lr", "bs.csv", "r3.csv"), 0);
    assert_code(&validate("lr", "dis.csv", "r4.csv"), 10);
}

#[test]
fn validate_reports_inconclusive_as_11() {
    let dir = tempfile::tempdir().unwrap();
    // An identity interferometer routes photons straight through, so the
    // two photon models coincide and the likelihood-ratio test cannot move.
    let u = Interferometer::new(
        ComplexMatrix::identity(4),
        Provenance::File { path: "identity".into() },
    )
    .unwrap();
    io::save_unitary(dir.path().join("id.json"), &u).unwrap();
    assert_code(
        &run_in(
            dir.path(),
            &[
                "sample",
                "--unitary",
                "id.json",
                "--input",
                "1 2",
                "--events",
                "10",
                "--seed",
                "0",
                "--out",
                "log.csv",
            ],
        ),
        0,
    );
    let out = run_in(
        dir.path(),
        &[
            "validate", "--unitary", "id.json", "--input", "1 2", "--log", "log.csv", "--test",
            "lr", "--out", "report.csv",
        ],
    );
    assert_code(&out, 11);
    assert!(String::from_utf8_lossy(&out.stdout).contains("inconclusive"));
}

#[test]
fn usage_and_runtime_errors_use_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown flag: clap usage error.
    assert_code(&run_in(dir.path(), &["gen-unitary", "--bogus"]), 2);
    // Missing --modes for a haar draw.
    assert_code(&run_in(dir.path(), &["gen-unitary", "--out", "u.json"]), 2);
    // Unknown test name.
    assert_code(
        &run_in(
            dir.path(),
            &[
                "validate", "--unitary", "u.json", "--input", "0 1", "--log", "x.csv", "--test",
                "bogus", "--out", "r.csv",
            ],
        ),
        2,
    );
    // Missing interferometer file: runtime error.
    let out = run_in(
        dir.path(),
        &[
            "validate", "--unitary", "absent.json", "--input", "0 1", "--log", "x.csv", "--test",
            "aa", "--out", "r.csv",
        ],
    );
    assert_code(&out, 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
    // Experiment without a system size.
    assert_code(&run_in(dir.path(), &["experiment", "haar-average"]), 2);
}

fn tiny_experiment_args<'a>(extra: &[&'a str], out_dir: &'a str) -> Vec<&'a str> {
    let mut args = vec![
        "--photons", "2", "--modes", "4", "--set-sizes", "1,5", "--trials", "10", "--unitaries",
        "2", "--seed", "3", "--exclusion-cap", "5", "--threshold", "0.5", "--out", out_dir,
    ];
    args.extend_from_slice(extra);
    args
}

#[test]
fn experiment_success_curve_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["experiment", "success-curve"];
    args.extend(tiny_experiment_args(&[], "run1"));
    assert_code(&run_in(dir.path(), &args), 0);
    let csv = fs::read_to_string(dir.path().join("run1/curve_bs.csv")).unwrap();
    assert!(csv.starts_with(
        "m,n,unitary_index,set_size,successes,trials,estimate,stderr,converging\n"
    ));
    // One curve over two set sizes.
    assert_eq!(csv.lines().count(), 3);
    let uniform = fs::read_to_string(dir.path().join("run1/curve_uniform.csv")).unwrap();
    assert_eq!(uniform.lines().count(), 3);
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("run1/manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "experiment success-curve");
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["parameters"]["master_seed"], 3);

    let mut args = vec!["experiment", "success-curve"];
    args.extend(tiny_experiment_args(&[], "run2"));
    assert_code(&run_in(dir.path(), &args), 0);
    assert_eq!(
        fs::read(dir.path().join("run1/curve_bs.csv")).unwrap(),
        fs::read(dir.path().join("run2/curve_bs.csv")).unwrap()
    );
    assert_eq!(
        fs::read(dir.path().join("run1/curve_uniform.csv")).unwrap(),
        fs::read(dir.path().join("run2/curve_uniform.csv")).unwrap()
    );
}

#[test]
fn experiment_haar_average_writes_all_result_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["experiment", "haar-average"];
    args.extend(tiny_experiment_args(&[], "avg"));
    assert_code(&run_in(dir.path(), &args), 0);
    for name in ["curves_bs.csv", "curves_uniform.csv", "ensemble.csv", "manifest.json"] {
        assert!(dir.path().join("avg").join(name).exists(), "{name} missing");
    }
    let summary = fs::read_to_string(dir.path().join("avg/ensemble.csv")).unwrap();
    assert!(summary.starts_with("set_size,bs_mean,bs_band,uniform_mean,uniform_band\n"));
    assert_eq!(summary.lines().count(), 3);
    let bs = fs::read_to_string(dir.path().join("avg/curves_bs.csv")).unwrap();
    // Two ensemble members over two set sizes.
    assert_eq!(bs.lines().count(), 5);
}

#[test]
fn experiment_nmin_sweeps_register_sizes_from_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{
            "photons": 2, "modes": 4, "modes_list": [4, 5],
            "set_sizes": [1, 5, 15], "trials_per_point": 50,
            "unitary_count": 2, "exclusion_cap": 15,
            "success_threshold": 0.6, "master_seed": 1
        }"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["experiment", "nmin", "--config", "cfg.json", "--out", "nm"],
    );
    assert_code(&out, 0);
    let csv = fs::read_to_string(dir.path().join("nm/nmin.csv")).unwrap();
    assert!(csv.starts_with("m,n,unitary_index,n_min,reached\n"));
    assert_eq!(csv.lines().count(), 5, "{csv}");
    assert_eq!(csv.lines().filter(|l| l.starts_with("4,2,")).count(), 2);
    assert_eq!(csv.lines().filter(|l| l.starts_with("5,2,")).count(), 2);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("nm/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["parameters"]["modes_list"], serde_json::json!([4, 5]));
}

#[test]
fn experiment_lr_curve_covers_both_sources() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["experiment", "lr-curve"];
    args.extend(tiny_experiment_args(&[], "lr"));
    assert_code(&run_in(dir.path(), &args), 0);
    // Two unitaries x two set sizes, one file per data source.
    for name in ["lr_curves_indistinguishable.csv", "lr_curves_distinguishable.csv"] {
        let csv = fs::read_to_string(dir.path().join("lr").join(name)).unwrap();
        assert_eq!(csv.lines().count(), 5, "{name}: {csv}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("lr/manifest.json")).unwrap())
            .unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 3);
}
