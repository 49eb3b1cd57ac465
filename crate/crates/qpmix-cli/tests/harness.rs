//! Harness-level tests: reproducibility of emitted files, the sweep and
//! study recipes, and the command-line binary itself.

use std::process::Command;

use qpmix_cli::config::{ErrorModelConfig, ExperimentConfig, ExperimentKind, HistogramSpec};
use qpmix_cli::experiments;

fn base_config(out: std::path::PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        experiment: ExperimentKind::ConstantOverrotation,
        n: 4,
        l: 3,
        t: 0.8,
        h: 1.0,
        j: 1.0,
        error: ErrorModelConfig::ConstantOverrotation { epsilon: 0.02 },
        total_shots: 20_000,
        shots_per_instance: 100,
        seed: 12,
        delta: 0.01,
        time_sweep: None,
        s_sweep: None,
        angles: None,
        grid_steps: 200,
        histogram: HistogramSpec {
            resample_size: 5_000,
            n_resamples: 2_000,
            bins: 50,
        },
        output_dir: out,
    }
}

/// Identical seeds reproduce byte-identical output files.
#[test]
fn rerun_is_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let cfg_a = base_config(dir_a.path().to_path_buf());
    let cfg_b = base_config(dir_b.path().to_path_buf());
    experiments::run(&cfg_a).unwrap();
    experiments::run(&cfg_b).unwrap();
    for name in [
        "samples_exact.csv",
        "samples_noisy.csv",
        "samples_mixture.csv",
        "histogram_mixture.csv",
    ] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    // results.json differs only in the output paths; compare arm blocks.
    let read = |p: &std::path::Path| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(p.join("results.json")).unwrap()).unwrap()
    };
    let (ja, jb) = (read(dir_a.path()), read(dir_b.path()));
    for arm in ["exact", "noisy", "mixture"] {
        assert_eq!(ja["arms"][arm]["mean"], jb["arms"][arm]["mean"]);
        assert_eq!(
            ja["arms"][arm]["empirical_std"],
            jb["arms"][arm]["empirical_std"]
        );
    }
}

/// A changed seed changes the sampled arms.
#[test]
fn seed_changes_samples() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let cfg_a = base_config(dir_a.path().to_path_buf());
    let mut cfg_b = base_config(dir_b.path().to_path_buf());
    cfg_b.seed = 13;
    experiments::run(&cfg_a).unwrap();
    experiments::run(&cfg_b).unwrap();
    let a = std::fs::read(dir_a.path().join("samples_mixture.csv")).unwrap();
    let b = std::fs::read(dir_b.path().join("samples_mixture.csv")).unwrap();
    assert_ne!(a, b);
}

/// The sweep recipe emits one row per Trotter step with the exact column
/// matching the statevector oracle.
#[test]
fn sweep_recipe_rows_match_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config(dir.path().to_path_buf());
    cfg.experiment = ExperimentKind::UnstructuredModeledSweep;
    cfg.n = 3;
    cfg.l = 4;
    cfg.t = 1.0;
    cfg.error = ErrorModelConfig::Unstructured {
        epsilon: 0.01,
        direction: None,
    };
    cfg.total_shots = 5_000;
    experiments::run(&cfg).unwrap();
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 4);
    assert!(lines[0].starts_with("time,nu,exact,noisy"));
    for (k, line) in lines[1..].iter().enumerate() {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let steps = k + 1;
        let time = cfg.t * steps as f64 / cfg.l as f64;
        assert!((cols[0] - time).abs() < 1e-12);
        assert_eq!(cols[1] as usize, 2 * cfg.n * steps);
        let c = qpmix::circuits::build_trotter_ising(cfg.n, steps, time, 1.0, 1.0).unwrap();
        let compiled = qpmix::circuits::compile_to_rz(&c).unwrap();
        let exact =
            qpmix::oracle::ideal_expectation(&compiled, &qpmix::pauli::PauliString::z_all(cfg.n))
                .unwrap();
        assert!((cols[2] - exact).abs() < 1e-10);
    }
}

/// Explicit time_sweep entries must sit on the Trotter grid.
#[test]
fn sweep_rejects_off_grid_times() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config(dir.path().to_path_buf());
    cfg.experiment = ExperimentKind::UnstructuredModeledSweep;
    cfg.error = ErrorModelConfig::Unstructured {
        epsilon: 0.01,
        direction: None,
    };
    cfg.time_sweep = Some(vec![0.35]);
    let err = experiments::run(&cfg).unwrap_err().to_string();
    assert!(err.contains("Trotter grid"), "{err}");
}

/// Instance-count study: with ε = 0 every instance count agrees with the
/// ideal value within shot noise, and the finest split (s = 1) converges.
#[test]
fn instance_count_study_zero_error_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config(dir.path().to_path_buf());
    cfg.experiment = ExperimentKind::InstanceCountStudy;
    cfg.error = ErrorModelConfig::ConstantOverrotation { epsilon: 0.0 };
    cfg.total_shots = 20_000;
    cfg.s_sweep = Some(vec![1, 2, 100, 10_000, 20_000]);
    let output = experiments::run(&cfg).unwrap();
    let exact = output.summary["exact_expectation"].as_f64().unwrap();
    let text = std::fs::read_to_string(dir.path().join("study.csv")).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (n_instances, mean) = (cols[0], cols[2]);
        assert!((cols[0] * cols[1] - cfg.total_shots as f64).abs() < 0.5);
        assert!(
            (mean - exact).abs() < 5.0 / (cfg.total_shots as f64).sqrt(),
            "N_c={n_instances}: {mean} vs {exact}"
        );
        rows += 1;
    }
    assert_eq!(rows, 5);
}

/// With a real over-rotation, very few instances give a poor estimate
/// (smoke only) while many instances converge; the reported per-shot std
/// stays essentially independent of the split.
#[test]
fn instance_count_study_converges_with_instances() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config(dir.path().to_path_buf());
    cfg.experiment = ExperimentKind::InstanceCountStudy;
    cfg.error = ErrorModelConfig::ConstantOverrotation { epsilon: 0.01 };
    cfg.n = 6;
    cfg.l = 10;
    cfg.t = 1.0;
    cfg.total_shots = 100_000;
    cfg.s_sweep = Some(vec![50_000, 1_000, 100, 10, 1]);
    let output = experiments::run(&cfg).unwrap();
    let exact = output.summary["exact_expectation"].as_f64().unwrap();
    let text = std::fs::read_to_string(dir.path().join("study.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    // Finest split: converged estimate.
    let finest = rows.iter().find(|r| r[1] == 1.0).unwrap();
    assert!((finest[2] - exact).abs() < 5.0 * finest[4]);
    // Reported per-shot std is independent of the split (within 10%).
    let stds: Vec<f64> = rows.iter().map(|r| r[3]).collect();
    let max = stds.iter().cloned().fold(f64::MIN, f64::max);
    let min = stds.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max / min < 1.1, "stds vary too much: {stds:?}");
}

/// External synthesis angles: a broadcast triple behaves like the modeled
/// unstructured error, and the mitigated arm recovers the exact value.
#[test]
fn external_angles_recover_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config(dir.path().to_path_buf());
    cfg.experiment = ExperimentKind::ExternalSynthesisAngles;
    cfg.n = 4;
    cfg.l = 3;
    cfg.t = 0.8;
    cfg.error = ErrorModelConfig::None;
    cfg.angles = Some(vec![[4e-4, 3e-4, 1.5e-3]]);
    cfg.total_shots = 200_000;
    let output = experiments::run(&cfg).unwrap();
    let exact = output.summary["exact_expectation"].as_f64().unwrap();
    let arms = &output.summary["arms"];
    let mt_mean = arms["mixture_twirl"]["mean"].as_f64().unwrap();
    let mt_se = arms["mixture_twirl"]["std_error"].as_f64().unwrap();
    assert!(
        (mt_mean - exact).abs() < 4.0 * mt_se + 1e-3,
        "mixture+twirl {mt_mean} vs exact {exact} (se {mt_se})"
    );
    // The noisy arm must be biased for the recipe to mean anything.
    let noisy = output.summary["noisy_expectation"].as_f64().unwrap();
    assert!((noisy - exact).abs() > 1e-3);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qpmix"))
}

#[test]
fn cli_oracle_check_passes() {
    let out = bin().arg("oracle-check").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS: two-term unitary decomposition"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn cli_rejects_unknown_config() {
    let out = bin().args(["run", "no-such-config"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not a file and not a preset"), "{err}");
}

#[test]
fn cli_scan_and_histogram_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let scan_path = dir.path().join("scan.csv");
    let out = bin()
        .args([
            "scan-ab",
            "--epsilon",
            "0.05",
            "--grid",
            "40",
            "--out",
            scan_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&scan_path).unwrap();
    assert!(text.starts_with("A,B,one_norm\n"));
    assert_eq!(text.lines().count(), 1 + 40 * 40);

    // Run a tiny experiment through the binary, then rebin its samples.
    let cfg = base_config(dir.path().join("exp"));
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = bin()
        .args(["run", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let hist_path = dir.path().join("hist.csv");
    let out = bin()
        .args([
            "histogram",
            dir.path().join("exp/samples_mixture.csv").to_str().unwrap(),
            "--resample-size",
            "5000",
            "--n-resamples",
            "1000",
            "--out",
            hist_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&hist_path).unwrap();
    assert_eq!(text.lines().count(), 1 + 50);
}

#[test]
fn cli_presets_listing() {
    let out = bin().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["fig1-desk", "fig2-paper", "fig4-desk", "fig5-scan"] {
        assert!(text.contains(name));
    }
    let out = bin()
        .args(["presets", "--show", "fig4-desk"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("constant_overrotation"));
}
