//! The experiment recipes: build the circuit, run every arm, emit files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use qpmix::circuits::{
    attach_errors, build_trotter_ising, compile_to_rz, CircuitSpec, GateOp, MitigationPolicy,
};
use qpmix::estimator::{
    estimate, estimate_ideal, estimate_unmitigated, shot_bound, EstimatorResult,
};
use qpmix::mixture::scan_ab;
use qpmix::noise::ErrorModel;
use qpmix::pauli::PauliString;

use crate::config::{ErrorModelConfig, ExperimentConfig, ExperimentKind};
use crate::histogram::{histogram_rng, resample_histogram};
use crate::output::{
    write_histogram_csv, write_json, write_rows_csv, write_samples_csv, write_scan_csv, ArmSummary,
};

/// Everything `run` leaves behind, with the JSON summary inlined for
/// callers that want to assert on it.
#[derive(Debug)]
pub struct RunOutput {
    pub results_path: PathBuf,
    pub summary: serde_json::Value,
}

#[derive(Serialize)]
struct RunSummary<'c> {
    experiment: ExperimentKind,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "T")]
    t: f64,
    nu: u64,
    seed: u64,
    delta: f64,
    error: &'c ErrorModelConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolved_direction: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_expectation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noisy_expectation: Option<f64>,
    arms: BTreeMap<&'static str, ArmSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan_argmin: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    study_path: Option<PathBuf>,
}

/// Draw a uniformly random unit vector from a dedicated stream.
pub fn random_direction(seed: u64, index: u64) -> [f64; 3] {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((1 << 61) + index);
    // Three Box-Muller normals, normalized.
    let mut normals = [0.0f64; 3];
    let mut i = 0;
    while i < 3 {
        let u1: f64 = uniform(&mut rng);
        let u2: f64 = uniform(&mut rng);
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        normals[i] = r * (2.0 * std::f64::consts::PI * u2).cos();
        i += 1;
        if i < 3 {
            normals[i] = r * (2.0 * std::f64::consts::PI * u2).sin();
            i += 1;
        }
    }
    let norm = (normals[0].powi(2) + normals[1].powi(2) + normals[2].powi(2)).sqrt();
    [normals[0] / norm, normals[1] / norm, normals[2] / norm]
}

fn uniform(rng: &mut ChaCha12Rng) -> f64 {
    use rand_chacha::rand_core::RngCore;
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Resolve the error config into a concrete model (drawing a direction for
/// the unstructured kind when the config leaves it random).
fn resolve_model(
    config: &ExperimentConfig,
    direction_index: u64,
) -> anyhow::Result<(ErrorModel, Option<[f64; 3]>)> {
    match &config.error {
        ErrorModelConfig::Unstructured { direction, .. } => {
            let dir = direction.unwrap_or_else(|| random_direction(config.seed, direction_index));
            Ok((config.error.to_model(Some(dir))?, Some(dir)))
        }
        other => Ok((other.to_model(None)?, None)),
    }
}

struct ArmSpec {
    name: &'static str,
    policy: Option<MitigationPolicy>,
    /// None: plain sampling of the ideal circuit.
    noisy: bool,
}

fn arms_for(kind: ExperimentKind) -> Vec<ArmSpec> {
    let base = vec![
        ArmSpec {
            name: "exact",
            policy: None,
            noisy: false,
        },
        ArmSpec {
            name: "noisy",
            policy: None,
            noisy: true,
        },
    ];
    let mut arms = base;
    match kind {
        ExperimentKind::ConstantOverrotation | ExperimentKind::UniformOverrotation => {
            arms.push(ArmSpec {
                name: "mixture",
                policy: Some(MitigationPolicy::Mixture),
                noisy: true,
            });
        }
        ExperimentKind::UnstructuredModeled | ExperimentKind::ExternalSynthesisAngles => {
            arms.push(ArmSpec {
                name: "twirl",
                policy: Some(MitigationPolicy::TwirlOnly),
                noisy: true,
            });
            arms.push(ArmSpec {
                name: "mixture",
                policy: Some(MitigationPolicy::Mixture),
                noisy: true,
            });
            arms.push(ArmSpec {
                name: "mixture_twirl",
                policy: Some(MitigationPolicy::MixtureTwirl),
                noisy: true,
            });
        }
        _ => {}
    }
    arms
}

/// Attach per-rotation unstructured errors from an explicit angle list
/// (length 1 broadcasts).
fn attach_external_angles(
    circuit: &CircuitSpec,
    angles: &[[f64; 3]],
    policy: MitigationPolicy,
) -> anyhow::Result<CircuitSpec> {
    let nu = circuit.nu();
    anyhow::ensure!(
        angles.len() == 1 || angles.len() == nu,
        "angles: got {}, expected 1 or {nu}",
        angles.len()
    );
    let mut rotation_idx = 0usize;
    let ops = circuit
        .ops
        .iter()
        .map(|op| match op {
            GateOp::Fixed(g) => GateOp::Fixed(*g),
            GateOp::Rotation(r) => {
                let a = if angles.len() == 1 {
                    angles[0]
                } else {
                    angles[rotation_idx]
                };
                rotation_idx += 1;
                GateOp::Rotation(qpmix::circuits::ParamRotation {
                    generator: r.generator,
                    theta: r.theta,
                    error: ErrorModel::Unstructured {
                        eps_x: a[0],
                        eps_y: a[1],
                        eps_z: a[2],
                    },
                    mitigation: policy,
                })
            }
        })
        .collect();
    Ok(CircuitSpec {
        n_qubits: circuit.n_qubits,
        ops,
    })
}

/// The exact (error-free) and errored circuits for one run.
struct CircuitPair {
    ideal: CircuitSpec,
    with_policy: Box<dyn Fn(MitigationPolicy) -> anyhow::Result<CircuitSpec>>,
    /// Representative ε for the analytic bounds.
    bound_epsilon: f64,
}

fn build_circuits(config: &ExperimentConfig, model: ErrorModel) -> anyhow::Result<CircuitPair> {
    let raw = build_trotter_ising(config.n, config.l, config.t, config.h, config.j)
        .map_err(|e| anyhow::anyhow!("circuit construction: {e}"))?;
    let bound_epsilon = model.mitigation_epsilon();
    match config.experiment {
        ExperimentKind::ConstantOverrotation
        | ExperimentKind::UniformOverrotation
        | ExperimentKind::InstanceCountStudy => {
            let base = raw.clone();
            Ok(CircuitPair {
                ideal: raw,
                with_policy: Box::new(move |policy| {
                    attach_errors(&base, model, policy).map_err(|e| anyhow::anyhow!("{e}"))
                }),
                bound_epsilon,
            })
        }
        ExperimentKind::UnstructuredModeled | ExperimentKind::UnstructuredModeledSweep => {
            let compiled = compile_to_rz(&raw).map_err(|e| anyhow::anyhow!("{e}"))?;
            let base = compiled.clone();
            Ok(CircuitPair {
                ideal: compiled,
                with_policy: Box::new(move |policy| {
                    attach_errors(&base, model, policy).map_err(|e| anyhow::anyhow!("{e}"))
                }),
                bound_epsilon,
            })
        }
        ExperimentKind::ExternalSynthesisAngles => {
            let compiled = compile_to_rz(&raw).map_err(|e| anyhow::anyhow!("{e}"))?;
            let angles = config
                .angles
                .clone()
                .ok_or_else(|| anyhow::anyhow!("angles: required"))?;
            // Mean |ε_z| is the representative mitigation strength.
            let mean_ez = angles.iter().map(|a| a[2].abs()).sum::<f64>() / angles.len() as f64;
            let base = compiled.clone();
            Ok(CircuitPair {
                ideal: compiled,
                with_policy: Box::new(move |policy| attach_external_angles(&base, &angles, policy)),
                bound_epsilon: mean_ez,
            })
        }
        ExperimentKind::AbScan => anyhow::bail!("ab_scan does not build circuits"),
    }
}

fn run_arm(
    spec: &ArmSpec,
    pair: &CircuitPair,
    observable: &PauliString,
    config: &ExperimentConfig,
    arm_seed: u64,
) -> anyhow::Result<EstimatorResult> {
    let result = match (spec.policy, spec.noisy) {
        (None, false) => estimate_ideal(&pair.ideal, observable, config.total_shots, arm_seed),
        (None, true) => {
            let noisy = (pair.with_policy)(MitigationPolicy::Off)?;
            estimate_unmitigated(&noisy, observable, config.total_shots, arm_seed)
        }
        (Some(policy), _) => {
            let circuit = (pair.with_policy)(policy)?;
            estimate(
                &circuit,
                observable,
                config.total_shots,
                config.shots_per_instance,
                arm_seed,
            )
        }
    }
    .map_err(|e| anyhow::anyhow!("arm {}: {e}", spec.name))?;
    Ok(result)
}

/// Run one experiment and write its files to `config.output_dir`.
pub fn run(config: &ExperimentConfig) -> anyhow::Result<RunOutput> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    match config.experiment {
        ExperimentKind::AbScan => run_ab_scan(config),
        ExperimentKind::UnstructuredModeledSweep => run_sweep(config),
        ExperimentKind::InstanceCountStudy => run_instance_count_study(config),
        _ => run_single_point(config),
    }
}

fn run_single_point(config: &ExperimentConfig) -> anyhow::Result<RunOutput> {
    let (model, resolved_direction) = resolve_model(config, 0)?;
    let pair = build_circuits(config, model)?;
    let observable = PauliString::z_all(config.n);
    let nu = pair.ideal.nu() as u64;

    let exact_expectation = qpmix::oracle::ideal_expectation(&pair.ideal, &observable)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let noisy_expectation = {
        let noisy = (pair.with_policy)(MitigationPolicy::Off)?;
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        noisy
            .evolve_noisy(&mut rng)
            .and_then(|s| s.expectation_pauli(&observable))
            .map_err(|e| anyhow::anyhow!("{e}"))?
    };

    let mut arms = BTreeMap::new();
    for (arm_index, spec) in arms_for(config.experiment).iter().enumerate() {
        let arm_seed = config.seed.wrapping_add(arm_index as u64);
        let result = run_arm(spec, &pair, &observable, config, arm_seed)?;

        let bound_eps = if spec.policy.is_some_and(|p| p.uses_mixture()) {
            pair.bound_epsilon
        } else {
            0.0
        };
        let mut summary = ArmSummary::new(&result, shot_bound(bound_eps, nu, config.delta, 1.0));

        let samples_path = config.output_dir.join(format!("samples_{}.csv", spec.name));
        write_samples_csv(&samples_path, &result)?;
        summary.weighted_samples_path = Some(samples_path);

        if result.weighted_samples.len() >= config.histogram.resample_size {
            let mut rng = histogram_rng(config.seed, arm_index as u64);
            let hist = resample_histogram(&result.weighted_samples, &config.histogram, &mut rng)?;
            let hist_path = config
                .output_dir
                .join(format!("histogram_{}.csv", spec.name));
            write_histogram_csv(&hist_path, &hist)?;
            summary.histogram_center = Some(hist.center);
            summary.histogram_bin_width = Some(hist.bin_width);
            summary.histogram_path = Some(hist_path);
        }
        arms.insert(spec.name, summary);
    }

    let summary = RunSummary {
        experiment: config.experiment,
        n: config.n,
        l: config.l,
        t: config.t,
        nu,
        seed: config.seed,
        delta: config.delta,
        error: &config.error,
        resolved_direction,
        exact_expectation: Some(exact_expectation),
        noisy_expectation: Some(noisy_expectation),
        arms,
        sweep_path: None,
        scan_path: None,
        scan_argmin: None,
        study_path: None,
    };
    finish(config, summary)
}

fn run_sweep(config: &ExperimentConfig) -> anyhow::Result<RunOutput> {
    let observable = PauliString::z_all(config.n);
    let step_time = config.t / config.l as f64;
    let steps: Vec<usize> = match &config.time_sweep {
        None => (1..=config.l).collect(),
        Some(times) => times
            .iter()
            .map(|&t| {
                let k = (t / step_time).round();
                anyhow::ensure!(
                    (t - k * step_time).abs() < 1e-9 && k >= 1.0 && k <= config.l as f64,
                    "time_sweep: {t} is not a Trotter grid point k·T/L"
                );
                Ok(k as usize)
            })
            .collect::<anyhow::Result<_>>()?,
    };

    let header = "time,nu,exact,noisy,twirl_mean,twirl_std_error,mixture_mean,mixture_std_error,mixture_twirl_mean,mixture_twirl_std_error";
    let mut rows = Vec::with_capacity(steps.len());
    let mut last_direction = None;
    for (step_index, &k) in steps.iter().enumerate() {
        // Fresh error direction per evaluated step, same per-gate angle.
        let (model, direction) = resolve_model(config, step_index as u64)?;
        last_direction = direction;
        let step_config = ExperimentConfig {
            l: k,
            t: config.t * k as f64 / config.l as f64,
            experiment: ExperimentKind::UnstructuredModeled,
            ..config.clone()
        };
        let pair = build_circuits(&step_config, model)?;
        let time = step_config.t;
        let nu = pair.ideal.nu() as f64;

        let exact = qpmix::oracle::ideal_expectation(&pair.ideal, &observable)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let noisy = {
            let c = (pair.with_policy)(MitigationPolicy::Off)?;
            let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
            c.evolve_noisy(&mut rng)
                .and_then(|s| s.expectation_pauli(&observable))
                .map_err(|e| anyhow::anyhow!("{e}"))?
        };

        let mut row = vec![time, nu, exact, noisy];
        for (arm_index, policy) in [
            MitigationPolicy::TwirlOnly,
            MitigationPolicy::Mixture,
            MitigationPolicy::MixtureTwirl,
        ]
        .iter()
        .enumerate()
        {
            let circuit = (pair.with_policy)(*policy)?;
            let arm_seed = config
                .seed
                .wrapping_add((step_index as u64) << 8)
                .wrapping_add(arm_index as u64);
            let r = estimate(
                &circuit,
                &observable,
                config.total_shots,
                config.shots_per_instance,
                arm_seed,
            )
            .map_err(|e| anyhow::anyhow!("{e}"))?;
            row.push(r.mean);
            row.push(r.std_error());
        }
        rows.push(row);
    }

    let sweep_path = config.output_dir.join("sweep.csv");
    write_rows_csv(&sweep_path, header, &rows)?;

    let summary = RunSummary {
        experiment: config.experiment,
        n: config.n,
        l: config.l,
        t: config.t,
        nu: config.nu(),
        seed: config.seed,
        delta: config.delta,
        error: &config.error,
        resolved_direction: last_direction,
        exact_expectation: None,
        noisy_expectation: None,
        arms: BTreeMap::new(),
        sweep_path: Some(sweep_path),
        scan_path: None,
        scan_argmin: None,
        study_path: None,
    };
    finish(config, summary)
}

fn run_ab_scan(config: &ExperimentConfig) -> anyhow::Result<RunOutput> {
    let epsilon = match config.error {
        ErrorModelConfig::ConstantOverrotation { epsilon } => epsilon,
        _ => anyhow::bail!("error.kind: ab_scan expects a constant over-rotation"),
    };
    let scan = scan_ab(epsilon, config.grid_steps);
    let scan_path = config.output_dir.join("scan.csv");
    write_scan_csv(&scan_path, &scan)?;
    let argmin = scan
        .argmin
        .map(|p| [p.offset_a, p.offset_b, p.one_norm.unwrap_or(f64::NAN)]);

    let summary = RunSummary {
        experiment: config.experiment,
        n: config.n,
        l: config.l,
        t: config.t,
        nu: config.nu(),
        seed: config.seed,
        delta: config.delta,
        error: &config.error,
        resolved_direction: None,
        exact_expectation: None,
        noisy_expectation: None,
        arms: BTreeMap::new(),
        sweep_path: None,
        scan_path: Some(scan_path),
        scan_argmin: argmin,
        study_path: None,
    };
    finish(config, summary)
}

fn default_s_sweep(total: u64) -> Vec<u64> {
    [
        1u64, 2, 4, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000, 25_000, 50_000,
    ]
    .into_iter()
    .filter(|&s| s <= total && total.is_multiple_of(s))
    .collect()
}

fn run_instance_count_study(config: &ExperimentConfig) -> anyhow::Result<RunOutput> {
    let (model, resolved_direction) = resolve_model(config, 0)?;
    let pair = build_circuits(config, model)?;
    let observable = PauliString::z_all(config.n);
    let sweep = config
        .s_sweep
        .clone()
        .unwrap_or_else(|| default_s_sweep(config.total_shots));

    let mut rows = Vec::with_capacity(sweep.len());
    for &s in &sweep {
        let circuit = (pair.with_policy)(MitigationPolicy::Mixture)?;
        let r = estimate(&circuit, &observable, config.total_shots, s, config.seed)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        rows.push(vec![
            r.n_instances as f64,
            s as f64,
            r.mean,
            r.empirical_std,
            r.std_error(),
        ]);
    }
    let study_path = config.output_dir.join("study.csv");
    write_rows_csv(
        &study_path,
        "n_instances,s,mean,empirical_std,std_error",
        &rows,
    )?;

    let exact_expectation = qpmix::oracle::ideal_expectation(&pair.ideal, &observable)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let summary = RunSummary {
        experiment: config.experiment,
        n: config.n,
        l: config.l,
        t: config.t,
        nu: config.nu(),
        seed: config.seed,
        delta: config.delta,
        error: &config.error,
        resolved_direction,
        exact_expectation: Some(exact_expectation),
        noisy_expectation: None,
        arms: BTreeMap::new(),
        sweep_path: None,
        scan_path: None,
        scan_argmin: None,
        study_path: Some(study_path),
    };
    finish(config, summary)
}

fn finish(config: &ExperimentConfig, summary: RunSummary<'_>) -> anyhow::Result<RunOutput> {
    let results_path = config.output_dir.join("results.json");
    write_json(&results_path, &summary)?;
    let value = serde_json::to_value(&summary)?;
    Ok(RunOutput {
        results_path,
        summary: value,
    })
}

/// `scan-ab` subcommand entry: write the grid CSV and report the argmin.
pub fn scan_to_file(
    epsilon: f64,
    grid_steps: usize,
    out: &Path,
) -> anyhow::Result<Option<[f64; 3]>> {
    let scan = scan_ab(epsilon, grid_steps);
    write_scan_csv(out, &scan)?;
    Ok(scan
        .argmin
        .map(|p| [p.offset_a, p.offset_b, p.one_norm.unwrap_or(f64::NAN)]))
}
